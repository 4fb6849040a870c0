# Puts the project root on sys.path so the tests import wmzi and source from a checkout.
