"""Describing a system in a model file and sweeping it.

Model files list Hamiltonian, source and dephasing entries as linear
functions c0 + c1*x of one sweep variable.  This script writes a small
V-type system (one ground state, two excited states), validates it, runs a
sweep and prints the CSV, then shows what a malformed file reports.
"""

from liouville.modelfile import ModelFileError, emit_csv, instantiate, parse_model, serialize_model
from liouville.runner import run_sweep

text = """\
# V system: ground state 1, excited states 2 and 3, probe detuning x on level 2
levels 3
ham 1 2 0.5
ham 1 3 2.0
ham 2 2 0:-0.5 -1     # -x - i/2
ham 3 3 0:-0.5
src 1 2 1
src 1 3 1
sweep x -4 4 9
observe pop 2
observe coh 1 2
"""

model = parse_model(text)
print("canonical form:")
print(serialize_model(model))
print(instantiate(model, 1.0).hamiltonian)

result, failures = run_sweep(model)
print("\n" + emit_csv(result))

bad = "levels 2\nham 1 3 0.5\nsrc 2 1 -abc\nobserve pop 4\n"
try:
    parse_model(bad)
except ModelFileError as exc:
    print("diagnostics for a malformed file:")
    print(exc)
