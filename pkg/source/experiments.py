from source.stage import Stage


class Paths(Stage):
    def initialize(self, data):
        self.output_file = self.get_output_name('paths.csv')


class Expand(Stage):
    def initialize(self, data):
        # The golden files compare the plain expansion text
        self.format = data.get('format', 'text')
        suffix = 'txt' if self.format == 'text' else self.format
        self.output_file = self.get_output_name(f'expansion.{suffix}')


class WeakValues(Stage):
    def initialize(self, data):
        self.output_file = self.get_output_name('weakvalues.csv')


class PointerShift(Stage):
    def initialize(self, data):
        self.output_file = self.get_output_name('pointer_shift.csv')

    def get_stage_commands(self):
        cmd = [self.base_command()]
        # the slope table is cheap next to the shifts themselves
        if data_flag(self.data, 'slopes'):
            slopes = self.base_command()
            slopes[slopes.index('--out') + 1] = self.get_output_name('residual_slopes.csv')
            cmd.append(slopes + ['--slopes'])
        return cmd


class Spectrum(Stage):
    def initialize(self, data):
        self.output_file = self.get_output_name('peaks.csv')
        self.signal_file = self.get_output_name('signal.csv')
        self.spectrum_file = self.get_output_name('spectrum.csv')

    def get_stage_commands(self):
        cmd = self.base_command()
        if not data_flag(self.data, 'scaling'):
            cmd += ['--signal-out', self.signal_file, '--spectrum-out', self.spectrum_file]
        return [cmd]


class PropagatorCheck(Stage):
    def initialize(self, data):
        self.output_file = self.get_output_name('checks.csv')
        self.export_file = self.get_output_name('oracle_wavefunction.csv')

    def get_stage_commands(self):
        return [self.base_command() + ['--export', self.export_file]]


def data_flag(data, key):
    return bool(data.get(key, False))
