from setuptools import setup, find_packages

setup(
    name="wmzi",
    version="0.1.0",
    description="Weak-measurement simulations of nested Mach-Zehnder interferometers.",
    long_description="Path enumeration, epsilon expansions, two-state weak values, pointer and spectrum simulations for nested Mach-Zehnder interferometers, with a Feynman-propagator toolkit.",
    long_description_content_type="text/markdown",
    packages=find_packages(include=["wmzi", "wmzi.*", "source", "source.*"]),
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "pandas>=1.5",
        "networkx>=3.1",
        "structlog>=22.3",
        "typer>=0.6",
        "jsonpickle>=2.2",
    ],
    extras_require={"test": ["pytest>=7.2"]},
    entry_points={
        "console_scripts": [
            "wmzi=wmzi.cli:entry_point",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
    ],
    python_requires=">=3.9",
)
