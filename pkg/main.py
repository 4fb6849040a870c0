from argparse import ArgumentParser
import sys

from source.workflow import Workflow
from wmzi.config import RunConfig
from wmzi.errors import WmziError

if __name__ == "__main__":
    # Retrieve the input json file
    parser = ArgumentParser(
        prog='wmzi_pipeline',
        description='Run a sequence of wmzi experiments described by a pipeline file'
        )
    parser.add_argument(
        'param_config', help='Json file with the pipeline title, output directory and stages'
        )
    args = parser.parse_args()

    pipeline = args.param_config

    try:
        data = RunConfig.read_json(pipeline)
        workflow = Workflow(data, pipeline)
    except WmziError as e:
        print(f'error: {e}', file=sys.stderr)
        sys.exit(e.exit_code)

    # Write and execute end-to-end shell script
    workflow.write_script()
    sys.exit(workflow.execute() or 0)
