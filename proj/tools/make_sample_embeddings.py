#!/usr/bin/env python3
"""Writes the toy word2vec text file bundled with the sample corpus.

Tokens are grouped into topics; each token vector is its topic center plus
small noise, so related disease words end up with high cosine similarity.
"""
import sys

import numpy as np

DIM = 16
TOPICS = {
    "cardio": ["hypertension", "essential", "stroke", "heart", "failure", "coronary", "artery",
               "myocardial", "infarction", "atrial", "fibrillation", "hyperlipidaemia",
               "dyslipidemia", "blood", "pressure"],
    "metabolic": ["diabetes", "mellitus", "diabetic", "obesity", "metabolic", "insulin", "glucose",
                  "neuropathy"],
    "neuro": ["carpal", "tunnel", "low", "back", "pain", "spinal", "cord", "injury", "cerebral",
              "palsy", "aphasia", "rehabilitation"],
    "respiratory": ["asthma", "allergic", "rhinitis", "obstructive", "pulmonary", "pneumonia",
                    "lung", "infection"],
    "oncology": ["cancer", "breast", "tumor"],
    "generic": ["disease", "syndrome", "type", "2", "chronic"],
}


def main(path):
    rng = np.random.default_rng(20160901)
    centers = {name: rng.normal(0.0, 1.0, DIM) for name in TOPICS}
    rows = []
    for name, tokens in TOPICS.items():
        for token in tokens:
            noise = 0.6 if name == "generic" else 0.35
            rows.append((token, centers[name] + rng.normal(0.0, noise, DIM)))
    with open(path, "w", encoding="utf-8") as out:
        out.write(f"{len(rows)} {DIM}\n")
        for token, vec in rows:
            out.write(token + " " + " ".join(f"{v:.6f}" for v in vec) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "embeddings.txt")
