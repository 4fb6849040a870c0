from datetime import datetime
from os import path
import os

from structlog import get_logger

from source.stage import Stage
from wmzi.config import RunConfig
from wmzi.context import context

import source.typedict as td

log = get_logger(__name__)

class Workflow:
    def __init__(self, data, pipeline, timestamp=None):
        # Load working dirs
        self.pipeline = path.abspath(pipeline)
        self.working_dir = path.dirname(self.pipeline)

        # Load global parameters
        self.title = data['title']
        self.output_dir = data.get('output_dir', 'samples')
        if not path.isabs(self.output_dir):
            self.output_dir = f'{self.working_dir}/{self.output_dir}'

        # Get timestamp of the run
        self.timestamp = timestamp or datetime.now().strftime("%Y%m%d-%H:%M:%S")
        self.run_dir = f'{self.output_dir}/{self.title}-{self.timestamp}'

        # Reject unknown stage names before anything is written
        stage_data = data.get('stages', [])
        for i, stage in enumerate(stage_data):
            RunConfig.select_stage(data, stage.get('name'), i + 1)

        # Initialize first set of commands
        self.commands = [
            '#!/bin/bash',
            'set -e',
            'global_start_time=$SECONDS',
            'echo "*** INITIALIZING OUTPUT DIRECTORIES ***"',
            f'[ ! -d "{self.run_dir}" ] && mkdir -p "{self.run_dir}" > /dev/null',
            f'cd "{self.run_dir}"',
            'echo "Stage,Time (HH:MM:SS)" >> execution_times.csv',
            'echo "*** DONE ***"'
        ]

        # Initialize stages
        self.stages = [Stage(stage, self.pipeline, self.run_dir, i + 1) for i, stage in enumerate(stage_data)]

        for stage, data_ in zip(self.stages, stage_data):
            td.cast(stage, stage.name)
            stage.initialize(data_)

        # Get commands for each stage
        for stage in self.stages:
            self.commands = self.commands + stage.get_command()

        # Get overall timing
        self.commands = self.commands + [
            'end_time=$SECONDS',
            'elapsed_time=$((end_time - global_start_time))',
            'hours=$(($elapsed_time / 3600))',
            'minutes=$(($elapsed_time % 3600 / 60))',
            'seconds=$(($elapsed_time % 60))',
            'formatted_time=$(printf "%02d:%02d:%02d" $hours $minutes $seconds)',
            'echo "Overall Time Elapsed: $formatted_time"',
            'echo "*** PIPELINE DONE ***"'
        ]

    def write_script(self):
        self.script_path = context.with_output_dir(self.output_dir).request_subpath("commands.sh")
        with open(self.script_path, "w", encoding="utf-8") as file:
            file.writelines(line + "\n" for line in self.commands)
        log.info("wrote pipeline script", path=self.script_path, stages=len(self.stages))

    def execute(self):
        try:
            status = os.system(f'''
                cd "{self.output_dir}";
                chmod +x commands.sh;
                bash -o pipefail -c "./commands.sh | tee pipeline_{self.timestamp}.log";
                rc=$?;
                mv commands.sh "{self.title}-{self.timestamp}/";
                mv pipeline_{self.timestamp}.log "{self.title}-{self.timestamp}/";
                exit $rc
            ''')
        except KeyboardInterrupt:
            print('Aborted!')
            return None
        return os.waitstatus_to_exitcode(status)
