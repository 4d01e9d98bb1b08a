# ensures this directory is importable (synth / lp_oracle helpers)
