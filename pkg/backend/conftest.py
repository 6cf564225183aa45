"""
Shared pytest configuration
"""


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: larger randomized sweeps (deselect with -m 'not slow')")
