# BANDEDGE v1.0 Tests
