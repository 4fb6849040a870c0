import json
import os
import subprocess
import sys
from pathlib import Path

from datetime import datetime

PROJECT_ROOT = Path(__file__).parents[1]
LAYOUTS = PROJECT_ROOT / "layouts"
GOLDEN = Path(__file__).parent / "golden"


def run_wmzi(*args, cwd=PROJECT_ROOT):
    ''' Run the wmzi command line in a subprocess and capture both streams '''
    return subprocess.run(
        [sys.executable, "-m", "wmzi", *[str(a) for a in args]],
        cwd=cwd,
        capture_output=True,
        text=True,
    )


def get_max_timestamp(timestamps):
    ''' Get most recent timestamp out of a list of YYYYMMDD-HH:MM:SS strings '''
    return max(timestamps,
               key=lambda x: datetime.strptime(x, "%Y%m%d-%H:%M:%S"))


def get_recent_run(dirs, run_name):
    ''' Get most recent run directory from the outputs directory '''
    timestamps = [
        d[len(run_name) + 1:] for d in dirs if d.startswith(run_name + '-')
    ]
    max_timestamp = get_max_timestamp(timestamps)
    return f'{run_name}-{max_timestamp}'


def run_pipeline(data_dir: str):
    ''' Wrapper for running the pipeline runner on a test dataset

    parameters
    ----------
    data_dir: directory under tests/ holding the pipeline.json

    returns
    -------
    The exit code and a dictionary mapping output file names to paths
    '''
    full_path = Path(__file__).parent / data_dir
    pipeline = full_path / 'pipeline.json'

    proc = subprocess.run([sys.executable, 'main.py', str(pipeline)], cwd=PROJECT_ROOT)

    with open(pipeline, 'r') as file:
        data = json.load(file)
    samples = full_path / data['output_dir']
    run_dir = samples / get_recent_run(os.listdir(samples), data['title'])

    return proc.returncode, {f: run_dir / f for f in os.listdir(run_dir)}
