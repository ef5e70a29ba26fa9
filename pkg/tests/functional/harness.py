import os
import subprocess
import sys

import pytest
import yaml


class MbwaveHarness:
    """
    Runs ``python -m mbwave`` in a child process so exit statuses and
    the logging setup are those a user sees.
    """

    settings = {'log level': 'WARNING'}

    @classmethod
    def setup_class(cls):
        # copy the current sys.path to PYTHONPATH so the child process
        #  sees the same packages
        cls.env = os.environ.copy()
        cls.env['PYTHONPATH'] = os.pathsep.join(sys.path)

    @pytest.fixture(autouse=True)
    def settings_file(self, tmp_path):
        path = tmp_path / 'settings.yaml'
        path.write_text(yaml.safe_dump(self.settings), encoding='utf-8')
        self.config_fn = path

    def mbwave(self, *args, timeout=600):
        # Launch through the module rather than the console entry point
        #  so the interpreter under test is used.
        cmd = [sys.executable, '-m', 'mbwave', '--config', str(self.config_fn)]
        cmd.extend(map(str, args))
        try:
            return subprocess.run(
                cmd,
                env=self.env,
                capture_output=True,
                text=True,
                timeout=timeout,
            )
        except OSError:
            pytest.skip("Unable to launch mbwave (mbwave must be installed)")
