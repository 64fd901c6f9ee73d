import setuptools

with open("requirements.txt", "r") as fh:
    requirements = [x.strip() for x in fh.readlines() if x.strip()]

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="TreeCap",
    version="0.1.0",
    description="p-capacities, equilibrium measures and square tilings on rooted trees",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=requirements,
    extras_require={"test": ["pytest>=6"]},
    entry_points={"console_scripts": ["treecap=TreeCap.cli:main"]},
    classifiers=[
        "Programming Language :: Python :: 3.8",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.8',
)
