from setuptools import setup, find_packages


setup(
    name='ampsizer',
    version='0.1.0',
    description='Calibrated, simulation-in-the-loop op-amp sizing',
    long_description=open('README.rst').read(),
    packages=find_packages(exclude=['tests', 'tests.*']),
    package_data={
        'ampsizer.library': ['*.cfg', 'netlists/*.sp', 'plans/*.plan'],
        'ampsizer.prompt': ['rules/*/*.txt'],
    },
    install_requires=open('requirements.txt').read().strip().split('\n'),
    entry_points={
        'console_scripts': ['ampsizer = ampsizer.cli:main'],
    },
    license='MIT License',
    keywords=['analog', 'op-amp', 'sizing', 'spice', 'llm'],
    classifiers=[
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Electronic Design Automation (EDA)',
    ],
)
