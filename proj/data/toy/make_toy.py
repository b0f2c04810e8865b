"""Regenerates the toy corpus and its companion tables (deterministic)."""
import json
import random
import re

rng = random.Random(2022)

COMMENTS = [
    ["Great shot! The light on the water is beautiful.", "Nice composition. I like the sky."],
    ["The focus is soft and the background is distracting.", "Too dark for me."],
    ["Wonderful colors and strong contrast in this landscape. The tree frames the scene well!"],
    ["Nice.", "The bird is sharp but the branch in the corner is cluttered. Crop tighter next time?"],
    ["Lovely portrait, the eye is tack sharp and the hair light works.", "The smile makes it."],
    ["Flat lighting. The subject gets lost against the wall.", "I would try a lower angle."],
    ["Stunning reflection of the mountain in the lake. Perfect symmetry and great depth of field."],
    ["The cat looks bored.", "Cute cat, but the exposure is a bit hot on the window."],
    ["Simple and clean. The shadow of the chair adds a nice texture to the floor."],
    ["Wow!", "Fantastic motion blur on the car. The panning is well done and the color pops."],
    ["Muddy tones and too much noise in the dark areas.", "Still an interesting concept."],
    ["The flower petals glow against the black background. Beautiful macro detail."],
    ["I love the warm tone of the sunset over the beach. The horizon is tilted though."],
    ["Good idea but the framing feels cramped.", "The dog is cut off at the edge of the frame."],
    ["The street scene tells a story. Nice timing with the man on the bike."],
    ["Overexposed sky and weak foreground.", "Try a graduated filter on the sky."],
    ["Excellent use of leading lines. The bridge draws the eye into the fog."],
    ["The child's expression is priceless. Soft window light is perfect for this."],
    ["Boring.", "Nothing in this image holds my attention, sorry."],
    ["Gorgeous texture on the old wooden door. The rust and peeling paint add character and mood."],
]

lines = []
sentiment = []
seen = set()
for i, comments in enumerate(COMMENTS):
    image_id = f"img{i + 1:03d}"
    score = round(rng.uniform(3.0, 8.5), 2) if i % 4 != 3 else None
    row = {"image_id": image_id, "aesthetic_score": score,
           "comments": [{"comment_id": f"{image_id}-c{k + 1}", "text": t}
                        for k, t in enumerate(comments)]}
    lines.append(json.dumps(row))
    for t in comments:
        for frag in re.split(r"[.!?]", t):
            frag = frag.strip()
            if frag and frag not in seen:
                seen.add(frag)
                p = round(rng.random(), 4)
                n = round(rng.random() * (1 - p), 4)
                sentiment.append({"text": frag, "positive": p, "negative": n})

with open("corpus.jsonl", "w") as f:
    f.write("\n".join(lines) + "\n")
with open("sentiment.jsonl", "w") as f:
    f.write("\n".join(json.dumps(s) for s in sentiment) + "\n")

CANDIDATES = [
    "the light on the water is beautiful",
    "the light on the water is lovely",
    "beautiful light on the water",
    "nice shot",
    "the composition is nice and the sky is dramatic",
    "great composition with a dramatic sky",
    "the colors are vibrant and the contrast is strong",
    "vibrant colors and strong contrast",
    "the focus is soft",
    "i like it",
    "the tree in the foreground leads the eye into the scene",
    "a tree in the foreground leads the eye",
    "too dark",
    "the reflection of the mountain in the lake is stunning",
    "stunning reflection in the lake",
    "nice shot",
]
with open("candidates.jsonl", "w") as f:
    for k, t in enumerate(CANDIDATES):
        f.write(json.dumps({"text": t, "confidence": round(1.0 - k * 0.05, 2)}) + "\n")

with open("blacklist.txt", "w") as f:
    f.write("# bad captions seen repeatedly across images\nnice shot\ni like it\n")

labels_sentences = []
for i, comments in enumerate(COMMENTS[:6]):
    image_id = f"img{i + 1:03d}"
    for k, t in enumerate(comments):
        frags = [x.strip() for x in re.split(r"[.!?]", t) if x.strip()]
        for s, frag in enumerate(frags):
            n_tokens = len(frag.split())
            lp = [round(-rng.uniform(0.01, 3.0), 4) for _ in range(n_tokens + 1)]
            labels_sentences.append({"image_id": image_id, "comment_id": f"{image_id}-c{k + 1}",
                                     "sentence_index": s, "log_probs": lp})
with open("logprobs.jsonl", "w") as f:
    f.write("\n".join(json.dumps(r) for r in labels_sentences) + "\n")
