import os
import sys

# ctest points this at the module built in the CMake tree; it must win over
# an editable install of the package.
_build = os.environ.get("LAGPOT_BUILD_PYTHONPATH")
if _build:
    sys.meta_path[:] = [f for f in sys.meta_path if type(f).__name__ != "ScikitBuildRedirectingFinder"]
    sys.path.insert(0, _build)
