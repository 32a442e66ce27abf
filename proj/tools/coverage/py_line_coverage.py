"""Line coverage wrapper for Python guests.

Usage: py_line_coverage.py SOURCE PROGRAM

Runs PROGRAM (the solution itself or a driver that imports it) with stdin
passed through, and prints "total N" followed by one "hit L" line per
statement line of SOURCE that executed. The guest's own stdout is discarded.
"""
import ast
import io
import os
import runpy
import sys


def statement_lines(path):
    with open(path) as f:
        tree = ast.parse(f.read(), path)
    return {node.lineno for node in ast.walk(tree) if isinstance(node, ast.stmt)}


def main():
    source = os.path.realpath(sys.argv[1])
    program = sys.argv[2]
    lines = statement_lines(source)
    hit = set()
    resolved = {}

    def tracer(frame, event, arg):
        name = frame.f_code.co_filename
        if name not in resolved:
            resolved[name] = os.path.realpath(name) == source
        if not resolved[name]:
            return None
        if event == "line":
            hit.add(frame.f_lineno)
        return tracer

    real_stdout = sys.stdout
    sys.stdout = io.StringIO()
    sys.argv = [program]
    sys.path.insert(0, os.path.dirname(os.path.realpath(program)))
    sys.settrace(tracer)
    try:
        runpy.run_path(program, run_name="__main__")
    except BaseException:
        pass
    finally:
        sys.settrace(None)
        sys.stdout = real_stdout
    print("total", len(lines))
    for line in sorted(hit & lines):
        print("hit", line)


main()
