import ast
import re

from run_wmzi import PROJECT_ROOT


def imported_modules():
    found = set()
    for path in [*(PROJECT_ROOT / 'wmzi').glob('*.py'), *(PROJECT_ROOT / 'source').glob('*.py'), PROJECT_ROOT / 'main.py']:
        for node in ast.walk(ast.parse(path.read_text())):
            if isinstance(node, ast.Import):
                found.update(alias.name.split('.')[0] for alias in node.names)
            elif isinstance(node, ast.ImportFrom) and node.module and node.level == 0:
                found.add(node.module.split('.')[0])
    return found


def test_every_requirement_is_imported():
    setup = (PROJECT_ROOT / 'setup.py').read_text()
    block = re.search(r'install_requires=\[(.*?)\]', setup, re.S).group(1)
    requirements = re.findall(r'"([A-Za-z0-9_\-]+)', block)

    assert requirements
    assert set(requirements) <= imported_modules()
