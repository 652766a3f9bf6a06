"""Generate the bundled 50-row QA fixtures (deterministic, seeded).

Run from the repo root: python3 scripts/make_dataset_fixtures.py
Rewrites src/ragebench/fixtures/datasets/*.json and the CSV twin.
"""

import csv
import json
import random
from pathlib import Path

TOPICS = [
    ("granite", "a coarse-grained igneous rock formed from slowly cooling magma"),
    ("chlorophyll", "the green pigment that lets plants absorb light for photosynthesis"),
    ("hypatia", "a philosopher and astronomer who taught in alexandria"),
    ("monsoon", "a seasonal reversal of winds that brings heavy rainfall"),
    ("ribosome", "the cellular machine that assembles proteins from amino acids"),
    ("basalt", "a dark volcanic rock common on the ocean floor"),
    ("tundra", "a cold biome where tree growth is limited by short seasons"),
    ("gutenberg", "the printer credited with introducing movable type to europe"),
    ("isotope", "a variant of an element with a different number of neutrons"),
    ("aquifer", "an underground layer of rock that stores groundwater"),
    ("pendulum", "a weight suspended from a pivot that swings with a regular period"),
    ("lichen", "a composite organism of fungus and algae growing on surfaces"),
    ("sonar", "a technique that uses sound propagation to locate objects underwater"),
    ("delta", "a landform created by sediment deposited where a river meets the sea"),
    ("enzyme", "a protein that accelerates chemical reactions in living cells"),
    ("quasar", "an extremely luminous galactic nucleus powered by a black hole"),
    ("permafrost", "ground that stays frozen for at least two consecutive years"),
    ("alloy", "a mixture of metals engineered for specific properties"),
    ("estuary", "a partially enclosed body of water where fresh and salt water mix"),
    ("neuron", "a cell that transmits electrical signals through the nervous system"),
    ("glacier", "a persistent body of ice that moves slowly under its own weight"),
    ("papyrus", "a writing material made from the pith of a wetland plant"),
    ("magnetite", "an iron oxide mineral that is naturally magnetic"),
    ("plankton", "small drifting organisms that form the base of aquatic food webs"),
    ("turbine", "a rotary machine that extracts energy from a moving fluid"),
]

FILLER = [
    "Field surveys documented the phenomenon across several regions.",
    "Early researchers disagreed about the underlying mechanism.",
    "Modern instruments measure the effect with far greater precision.",
    "Textbooks often introduce the concept with a simple diagram.",
    "Recent studies refined the accepted estimates considerably.",
    "The discovery changed how the subject was taught for decades.",
]


def make_rows(rng, dataset, n=50):
    rows = []
    for i in range(n):
        topic, definition = TOPICS[i % len(TOPICS)]
        filler = rng.sample(FILLER, 2)
        context = (
            f"{topic.capitalize()} is {definition}. {filler[0]}\n\n"
            f"In the {dataset} archive, entry {i} records that {topic} was studied "
            f"extensively in {1800 + rng.randrange(200)}. {filler[1]}"
        )
        rows.append(
            {
                "context": context,
                "question": f"What is {topic}?",
                "answer": f"{topic.capitalize()} is {definition}.",
            }
        )
    return rows


def main():
    out_dir = Path(__file__).resolve().parents[1] / "src" / "ragebench" / "fixtures" / "datasets"
    out_dir.mkdir(parents=True, exist_ok=True)
    for dataset, seed in (("naturalquestions", 11), ("newsqa", 22), ("triviaqa", 33)):
        rng = random.Random(seed)
        rows = make_rows(rng, dataset)
        path = out_dir / f"{dataset}_fixture.json"
        path.write_text(json.dumps(rows, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        print(f"wrote {path} ({len(rows)} rows)")

    # CSV twin of the first fixture, including quoted embedded commas.
    rng = random.Random(11)
    rows = make_rows(rng, "naturalquestions", 10)
    rows[0]["context"] = 'Granite, unlike basalt, cools slowly. It is "coarse, grained", and hard.'
    csv_path = out_dir / "qa_fixture.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=["context", "question", "answer"])
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {csv_path}")


if __name__ == "__main__":
    main()
