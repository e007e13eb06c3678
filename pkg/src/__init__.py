"""Multi-source test-time adaptation simulator."""
