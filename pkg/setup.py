from setuptools import find_packages, setup

setup(
    name='src',
    packages=find_packages(),
    version='0.1.0',
    description='A TAC travel market simulator with the ATTac bidding agent, an exact allocator and a controlled-experiment harness.',
    author='offtian',
    license='',
    install_requires=['click', 'python-dotenv', 'pydantic>=2', 'numpy>=1.24', 'scipy>=1.10'],
)
