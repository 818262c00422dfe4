import importlib
import sys

REQUIRED_PYTHON = "python3"
REQUIRED_PACKAGES = ["click", "dotenv", "numpy", "pydantic", "scipy"]


def main():
    system_major = sys.version_info.major
    if REQUIRED_PYTHON == "python":
        required_major = 2
    elif REQUIRED_PYTHON == "python3":
        required_major = 3
    else:
        raise ValueError("Unrecognized python interpreter: {}".format(
            REQUIRED_PYTHON))

    if system_major != required_major:
        raise TypeError(
            "This project requires Python {}. Found: Python {}".format(
                required_major, sys.version))

    missing = []
    for package in REQUIRED_PACKAGES:
        try:
            importlib.import_module(package)
        except ImportError:
            missing.append(package)
    if missing:
        raise ImportError("Missing packages: {}".format(", ".join(missing)))

    # HiGHS backs the allocator's LP relaxations
    from scipy.optimize import linprog
    if linprog([-1], A_ub=[[1]], b_ub=[1], bounds=[(0, None)], method="highs").status != 0:
        raise RuntimeError("scipy.optimize.linprog(method='highs') is not usable")

    print(">>> Development environment passes all tests!")


if __name__ == '__main__':
    main()
