import json
import re

import ribnet as rn
from ribnet.cli.runner import RunConfig, run


def test_version_semver():
    assert isinstance(rn.__version__, str)
    assert re.match(r"^\d+\.\d+\.\d+$", rn.__version__)


def test_version_in_reports(capsys):
    assert run(RunConfig(dataset="ds-n2-l1", command="omega")) == 0
    out = capsys.readouterr().out
    report = json.loads(out)
    assert report["version"] == rn.__version__
    assert report["tool"] == "ribnet"
