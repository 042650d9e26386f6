import logging
import shutil
import tempfile
from pathlib import Path

import numpy as np

from .logging import LOG_FORMAT


class HeislabTestCase:
    """
    Base class for heislab tests. Each test gets a scratch directory ``self.TEST_DIR``, removed
    afterwards, and a generator ``self.rng`` seeded with :attr:`SEED`, so random fixtures are
    the same on every run.
    """

    SEED = 1

    def setup_method(self):
        logging.basicConfig(format=LOG_FORMAT, level=logging.DEBUG)
        self.TEST_DIR = Path(tempfile.mkdtemp(prefix="heislab_tests"))
        self.rng = np.random.default_rng(self.SEED)

    def teardown_method(self):
        shutil.rmtree(self.TEST_DIR, ignore_errors=True)
