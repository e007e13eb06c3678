import math

# Batch-norm layers
BN_EPS = 1e-5 # Variance stabilizer, also the floor before sqrt for observed std
BN_MOMENTUM = 0.1 # EMA rate for running statistics during source training

EPS_LOG = 1e-12 # Probability clamp before any logarithm

# Network shape
HIDDEN_WIDTHS = (64, 64)

# Default desk-scale scenario
N_SOURCES = 4
N_CLASSES = 5
INPUT_DIM = 16
ROTATION_DEGREES = (0.0, 25.0, 50.0, 75.0) # One angle per source domain
ROTATION_STEP_DEGREES = 25.0 # Default angle step for domain ids past ROTATION_DEGREES
SHIFT_SCALE = 1.0 # Std of the per-domain Gaussian shift
NOISE_SCALE = 0.6 # Isotropic sample noise
MEAN_SCALE = 3.0 # Shared class means ~ MEAN_SCALE * N(0, I)
MEAN_JITTER = 0.25 # Per-domain perturbation of the shared class means

BATCH_SIZE = 128
HELD_OUT_SIZE = 2000 # Fixed per-source test set for forgetting evaluation

# Source training
TRAIN_SAMPLES = 3000
TRAIN_EPOCHS = 10
TRAIN_BATCH_SIZE = 64
TRAIN_LR = 0.1
TRAIN_MAX_ERROR = 0.05 # Own-domain error a trained source must reach

# Weight solver
WEIGHT_ITERS = 5
ALPHA_MIN = 1e-3
ALPHA_MAX = 10.0
ALPHA_DEFAULT = 0.1 # Used when the gradient vanishes or curvature is unusable
ALPHA_FIXED = 0.1 # Step size for the fixed-step ablation
SAFEGUARD_RETRIES = 3 # Step halvings before an iteration is abandoned
CURVATURE_TOLERANCE = 1e-12 # g'Hg below this fraction of g'g counts as non-positive
GRADIENT_TOLERANCE = 1e-12

# Single-source adapters
TENT_LR = 1e-3
TENT_STEPS = 1
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

# Output
CSV_LINE_TERMINATOR = "\n"
DEGREE = math.pi / 180.0
