from pathlib import Path

from setuptools import find_packages, setup


def parse_requirements_file(path):
    requirements = []
    with open(path) as requirements_file:
        for line in requirements_file:
            line = line.strip()
            if line.startswith("#") or len(line) <= 0:
                continue
            requirements.append(line)
    return requirements


# version.py defines the VERSION and VERSION_SHORT variables.
# We use exec here so we don't import heislab whilst setting up.
VERSION = {}  # type: ignore
with open("heislab/version.py", "r") as version_file:
    exec(version_file.read(), VERSION)

setup(
    name="heislab",
    version=VERSION["VERSION"],
    description="Laakso graphs, their embeddings in the Heisenberg group, and numerical checks "
    "of the Markov convexity obstruction.",
    long_description=Path("README.md").read_text(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Intended Audience :: Science/Research",
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    keywords="heisenberg group, laakso graph, metric embedding, markov convexity",
    license="Apache",
    packages=find_packages(exclude=["*.tests", "*.tests.*", "tests.*", "tests"]),
    entry_points={"console_scripts": ["heislab=heislab.__main__:main"]},
    install_requires=parse_requirements_file("requirements.txt"),
    extras_require={"dev": parse_requirements_file("dev-requirements.txt")},
    python_requires=">=3.8",
)
