import sys
from pathlib import Path

# make sibling helper modules (oracles, randgen) importable regardless of
# how pytest was invoked
_HERE = str(Path(__file__).resolve().parent)
if _HERE not in sys.path:
    sys.path.insert(0, _HERE)
