import os
from functools import cached_property
from typing import Optional


class Context:
    def __init__(self):
        # directory that receives the files of a run
        self._output_dir = "samples"

    def with_output_dir(self, output_dir):
        self._output_dir = output_dir
        self.__dict__.pop("output_dir", None)
        return self

    @cached_property
    def output_dir(self):
        os.makedirs(self._output_dir, exist_ok=True)
        return self._output_dir

    def request_subpath(self, name: str, subdir: Optional[str] = None) -> str:
        """ Path of a file inside the output directory, creating subdir on demand """
        base = self.output_dir if subdir is None else os.path.join(self.output_dir, subdir)
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, name)


# we export the context as a singleton
context = Context()
