from .domains import make_default_domains, make_domain, rotate, stream_rng
from .sampling import LabeledBatch, held_out_test_set, sample_batch
from .script import StreamBatch, build_scenario, iter_stream, load_scenario, one_hot, save_scenario
from .training import chunk_slices, evaluate_error, predict_labels, train_source
