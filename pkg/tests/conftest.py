# Keeps the tests directory importable so shared reference helpers in
# _reference.py can be imported from any test module.
