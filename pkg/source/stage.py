import shlex
import sys
from abc import abstractmethod
from os import path


class Stage:
    def __init__(self, data, pipeline, working_dir, index):
        self.name = data['name']
        self.pipeline = pipeline
        self.working_dir = working_dir
        self.index = index
        self.data = data

        # Every stage writes one table; format and file are fixed by the runner
        self.format = 'csv'
        self.output_file = None

    def get_output_name(self, suffix):
        return f'{self.working_dir}/S{self.index}_{suffix}'

    def base_command(self):
        ''' The wmzi invocation that reads this stage from the pipeline file '''
        return [
            sys.executable, '-m', 'wmzi', self.name,
            '--config', self.pipeline,
            '--stage', str(self.index),
            '--format', self.format,
            '--out', self.output_file,
        ]

    def get_command(self):
        project_root = path.dirname(path.dirname(path.abspath(__file__)))

        cmd = [
            f'echo "*** Starting {self.name} STAGE ***"',
            'stage_start_time=$SECONDS',
        ]

        stage_commands = [
            f'(cd {shlex.quote(project_root)} && {shlex.join(argv)})'
            for argv in self.get_stage_commands()
        ]

        # Output runtime and finish stage
        end_cmd = [
            'end_time=$SECONDS',
            'elapsed_time=$((end_time - stage_start_time))',
            'hours=$(($elapsed_time / 3600))',
            'minutes=$(($elapsed_time % 3600 / 60))',
            'seconds=$(($elapsed_time % 60))',
            'formatted_time=$(printf "%02d:%02d:%02d" $hours $minutes $seconds)',
            f'echo "Stage {self.index} Time Elapsed: $formatted_time"',
            f'echo "Stage {self.index} {self.name},$formatted_time" >> execution_times.csv',
            'echo "*** DONE ***"'
        ]

        return cmd + stage_commands + end_cmd

    def get_stage_commands(self):
        return [self.base_command()]

    @abstractmethod
    def initialize(self, data):
        pass
