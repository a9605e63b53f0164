import setuptools

setuptools.setup(
    name="convexpspline",
    version="0.1.0",
    author="Convex P-spline contributors",
    description="Convex linear P-spline regression with minimax hypothesis families and sup-norm risk studies.",
    long_description=open('README.md', "r", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    license="Apache License 2.0",
    keywords='convex regression shape constraints p-spline quadratic programming active set minimax monte-carlo',
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.8",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
    ],
    install_requires=[
        "numpy",
        "pandas",
        "PyYAML",
        "scipy",
        "tqdm"
    ],
    extras_require={
        "test": ["pytest"]
    },
    entry_points={
        "console_scripts": [
            "convexpspline=convexpspline.cli.main:main"
        ]
    },
)
