from hypothesis import settings

# Fixed example streams so reruns of the suite see the same cases.
settings.register_profile("repro", derandomize=True, deadline=None, print_blob=True)
settings.load_profile("repro")
