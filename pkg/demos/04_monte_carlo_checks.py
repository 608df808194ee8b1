# Sign and rank moment identities by simulation. Same table as `rankspectra verify`.
from rankspectra.harness import verify_lemmas

for row in verify_lemmas("all", mc_samples=200_000, prop_replications=20_000):
    print(row.line())
