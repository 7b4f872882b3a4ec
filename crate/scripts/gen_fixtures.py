#!/usr/bin/env python3
"""Generate the synthetic hotel and politician fixtures plus expectation files.

The expected hotel report is computed here from the generated data structures
(not from the Turtle/JSON files and not with the Rust code), so it acts as an
independent oracle for the validation pipeline.

Usage: python3 scripts/gen_fixtures.py [output-dir]   (default: fixtures/)
"""

import csv
import json
import math
import os
import random
import sys
import unicodedata

OUT = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "fixtures")
EARTH_RADIUS_M = 6371000.0

# --------------------------------------------------------------------------
# oracle helpers (kept deliberately naive)
# --------------------------------------------------------------------------


def collapse(s):
    return " ".join(s.split())


def strip_ends(s):
    while s and not s[0].isalnum():
        s = s[1:]
    while s and not s[-1].isalnum():
        s = s[:-1]
    return s


def norm_name(s):
    s = s.lower()
    s = unicodedata.normalize("NFD", s)
    s = "".join(c for c in s if not unicodedata.combining(c))
    s = s.lower()
    s = collapse(s)
    return strip_ends(s)


def norm_phone(s):
    digits = "".join(c for c in s if c in "0123456789")
    return digits.lstrip("0")


def norm_year(s):
    for i in range(len(s) - 3):
        chunk = s[i : i + 4]
        if all(c in "0123456789" for c in chunk):
            return chunk
    return ""


def norm_generic(s):
    return collapse(s.lower())


NORMALIZERS = {
    "name": norm_name,
    "address": norm_name,
    "phone": norm_phone,
    "year": norm_year,
    "generic": norm_generic,
}


def edit_distance(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        table[i][0] = i
    for j in range(len(b) + 1):
        table[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(table[i - 1][j] + 1, table[i][j - 1] + 1, table[i - 1][j - 1] + cost)
    return table[len(a)][len(b)]


def sim(a, b, kind, normalizer):
    na, nb = NORMALIZERS[normalizer](a), NORMALIZERS[normalizer](b)
    if kind == "exact":
        return 1.0 if na == nb else 0.0
    if kind == "token-jaccard":
        ta, tb = set(na.split()), set(nb.split())
        if not ta and not tb:
            return 1.0
        if not ta or not tb:
            return 0.0
        return len(ta & tb) / len(ta | tb)
    if not na and not nb:
        return 1.0
    if not na or not nb:
        return 0.0
    return 1.0 - edit_distance(na, nb) / max(len(na), len(nb))


def haversine(lat1, lon1, lat2, lon2):
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = math.radians(lat2 - lat1)
    dl = math.radians(lon2 - lon1)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def r4(x):
    return math.floor(x * 10000.0 + 0.5) / 10000.0


def round_floats(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, float):
        return r4(v)
    if isinstance(v, list):
        return [round_floats(x) for x in v]
    if isinstance(v, dict):
        return {k: round_floats(x) for k, x in v.items()}
    return v


def canonical(v):
    return json.dumps(round_floats(v), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def metrics(pairs):
    tp = sum(1 for p, c in pairs if p and c)
    fp = sum(1 for p, c in pairs if p and not c)
    tn = sum(1 for p, c in pairs if not p and not c)
    fn = sum(1 for p, c in pairs if not p and c)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"tp": tp, "fp": fp, "tn": tn, "fn": fn, "precision": precision, "recall": recall, "f1": f1}


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def ttl_str(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


# --------------------------------------------------------------------------
# hotels
# --------------------------------------------------------------------------

HOTEL_WORDS = [
    "Alpenhof", "Edelweiss", "Bergkristall", "Tirolerhof", "Sonnenhof", "Kaiserhof",
    "Gletscherblick", "Alpenrose", "Enzian", "Almhof", "Berghof", "Waldhof", "Seehof",
    "Post", "Krone", "Adler", "Hirschen", "Lamm", "Rössl", "Stern", "Bergland", "Alpina",
    "Zillertal", "Panorama", "Sonnenalm", "Jägerhof", "Wiesenhof", "Lindenhof", "Kirchenwirt",
    "Maria Theresia", "Bergwelt", "Fernblick", "Tuxerhof", "Glockenhof", "Schönblick",
    "Alpenland", "Forelle", "Gamshof", "Murmeltier", "Silberhorn", "Zirbenhof", "Auhof",
    "Brückenwirt", "Dorfkrug", "Elisabeth", "Friedheim", "Grüner Baum", "Hubertus",
    "Innblick", "Kristall",
]
PREFIXES = ["Hotel", "Gasthof", "Pension", "Gartenhotel", "Alpenhotel"]
VILLAGES = [
    ("Hintertux", "6293", 47.1047, 11.6797), ("Mayrhofen", "6290", 47.1667, 11.8667),
    ("Finkenberg", "6292", 47.1530, 11.8220), ("Kitzbühel", "6370", 47.4467, 12.3925),
    ("Sölden", "6450", 46.9650, 11.0076), ("Seefeld", "6100", 47.3300, 11.1900),
    ("Ischgl", "6561", 47.0126, 10.2921), ("Fügen", "6263", 47.3460, 11.8510),
]
STREETS = ["Dorfstrasse", "Hauptstrasse", "Bahnhofstrasse", "Kirchweg", "Sonnenweg", "Talstrasse", "Wiesenweg", "Bergweg"]

HOTEL_SOURCES = ["google", "osm", "yandex"]


def build_hotels(rng):
    hotels = []
    used = set()
    for i in range(50):
        word = HOTEL_WORDS[i]
        prefix = rng.choice(PREFIXES)
        name = f"{prefix} {word}"
        assert name not in used
        used.add(name)
        village, zipc, lat0, lon0 = rng.choice(VILLAGES)
        street = rng.choice(STREETS)
        number = rng.randint(1, 899)
        area = rng.choice(["5287", "5285", "5356", "5254", "5212", "5444", "5288"])
        local = str(rng.randint(1000, 99999))
        hotels.append({
            "id": f"h{i + 1:02d}",
            "name": name,
            "address": f"{street} {number}, {zipc} {village}",
            "street": street, "number": number, "zip": zipc, "village": village,
            "phone_digits": ("43", area, local),
            "lat": round(lat0 + rng.uniform(-0.02, 0.02), 6),
            "lon": round(lon0 + rng.uniform(-0.02, 0.02), 6),
        })
    return hotels


def phone_fmt(d, style):
    cc, area, local = d
    if style == "intl":
        return f"+{cc} {area} {local}"
    if style == "dash":
        return f"+{cc}-{area}-{local}"
    if style == "paren":
        return f"+{cc} ({area}) {local}"
    if style == "double0":
        return f"00{cc} {area} {local}"
    raise ValueError(style)


def perturb_digit(rng, local):
    pos = rng.randrange(len(local))
    repl = rng.choice([c for c in "0123456789" if c != local[pos]])
    return local[:pos] + repl + local[pos + 1 :]


def jitter(rng, lat, lon, meters):
    # ~111 km per degree latitude
    dlat = rng.uniform(-meters, meters) / 111000.0
    dlon = rng.uniform(-meters, meters) / (111000.0 * math.cos(math.radians(lat)))
    return round(lat + dlat, 6), round(lon + dlon, 6)


def gen_hotels():
    rng = random.Random(20211)
    truth = build_hotels(rng)
    ids = [h["id"] for h in truth]

    # -- injected KG errors ------------------------------------------------
    shuffled = ids[:]
    rng.shuffle(shuffled)
    renamed = set(shuffled[0:5])
    wrong_phone = set(shuffled[5:13])
    wrong_address = set(shuffled[13:21])
    no_geo = shuffled[21]  # skipped: only one populated matching property

    kg = []
    labels = []
    errors_doc = []
    for h in truth:
        k = dict(h)
        cc, area, local = h["phone_digits"]
        k["phone"] = phone_fmt((cc, area, local), "intl")
        name_ok = addr_ok = phone_ok = True
        if h["id"] in renamed:
            alt = HOTEL_WORDS[(HOTEL_WORDS.index(h["name"].split(" ", 1)[1]) + 17) % len(HOTEL_WORDS)]
            k["name"] = f"{h['name'].split(' ', 1)[0]} {alt} Resort"
            name_ok = False
            errors_doc.append(f"{h['id']}: renamed to '{k['name']}' (true name '{h['name']}')")
        if h["id"] in wrong_phone:
            k["phone"] = phone_fmt((cc, area, perturb_digit(rng, local)), "intl")
            phone_ok = False
            errors_doc.append(f"{h['id']}: phone digit changed to '{k['phone']}' (true '{phone_fmt(h['phone_digits'], 'intl')}')")
        if h["id"] in wrong_address:
            if rng.random() < 0.5:
                other = [v for v in VILLAGES if v[0] != h["village"]]
                v = rng.choice(other)
                k["address"] = f"{h['street']} {h['number']}, {v[1]} {v[0]}"
            else:
                street = rng.choice([s for s in STREETS if s != h["street"]])
                k["address"] = f"{street} {h['number'] + rng.randint(1, 40)}, {h['zip']} {h['village']}"
            addr_ok = False
            errors_doc.append(f"{h['id']}: address perturbed to '{k['address']}' (true '{h['address']}')")
        if h["id"] == no_geo:
            k["lat"] = k["lon"] = None
            errors_doc.append(f"{h['id']}: geo coordinates removed (instance is skipped)")
        kg.append(k)
        labels.append((h["id"], "name", name_ok))
        labels.append((h["id"], "address", addr_ok))
        labels.append((h["id"], "phone", phone_ok))

    # -- sources -----------------------------------------------------------
    sources = {s: [] for s in HOTEL_SOURCES}
    for h in truth:
        cc, area, local = h["phone_digits"]
        # google: broad coverage, KG-style addresses
        if rng.random() < 0.92:
            lat, lon = jitter(rng, h["lat"], h["lon"], 40)
            props = {"address": [h["address"] if rng.random() < 0.8 else h["address"].upper()]}
            if rng.random() < 0.9:
                props["phone"] = [phone_fmt(h["phone_digits"], rng.choice(["intl", "dash"]))]
            if rng.random() < 0.08:
                lat, lon = jitter(rng, h["lat"] + 0.02, h["lon"], 10)  # misplaced pin
            sources["google"].append({"id": f"g-{h['id']}", "name": h["name"].upper() if rng.random() < 0.2 else h["name"],
                                      "lat": lat, "lon": lon, "properties": props})
        # osm: patchy coverage, heterogeneous address format, aliased keys
        if rng.random() < 0.7:
            lat, lon = jitter(rng, h["lat"], h["lon"], 120)
            props = {"addr_full": [f"{h['street']} {h['number']} {h['village']}"]}
            if rng.random() < 0.6:
                props["phone_number"] = [phone_fmt(h["phone_digits"], "double0")]
            sources["osm"].append({"id": f"osm/{1000 + int(h['id'][1:])}", "name": f"  {h['name']} ",
                                   "lat": lat, "lon": lon, "properties": props})
        # yandex: good coverage, reordered address tokens, some stale phones
        if rng.random() < 0.8:
            lat, lon = jitter(rng, h["lat"], h["lon"], 60)
            props = {"address": [f"{h['street']} {h['number']}, {h['village']} {h['zip']}"]}
            if rng.random() < 0.85:
                loc = local if rng.random() < 0.85 else perturb_digit(rng, local)
                props["telephone"] = [phone_fmt((cc, area, loc), "paren")]
            sources["yandex"].append({"id": f"ya{7000 + int(h['id'][1:])}", "name": h["name"],
                                      "lat": lat, "lon": lon, "properties": props})
    # distractors: same names far away, unrelated places nearby
    for s, recs in sources.items():
        for j in range(6):
            h = truth[rng.randrange(50)]
            lat, lon = jitter(rng, h["lat"] + 0.3, h["lon"] - 0.3, 50)
            recs.append({"id": f"{s}-far-{j}", "name": h["name"], "lat": lat, "lon": lon, "properties": {}})
            lat, lon = jitter(rng, h["lat"], h["lon"], 30)
            recs.append({"id": f"{s}-near-{j}", "name": f"Café {HOTEL_WORDS[(j * 7) % 50]}", "lat": lat, "lon": lon, "properties": {}})
        recs.sort(key=lambda r: r["id"])

    ds = {
        "name": "hotel",
        "targetType": "Hotel",
        "properties": ["name", "address", "phone"],
        "matchingProperties": ["name", "geo"],
        "aliases": {
            "kg": {"streetAddress": "address", "telephone": "phone"},
            "osm": {"addr_full": "address", "phone_number": "phone"},
            "yandex": {"telephone": "phone"},
        },
    }
    similarity = {
        "name": {"kind": "levenshtein-normalized", "normalizer": "name"},
        "address": {"kind": "token-jaccard", "normalizer": "address"},
        "phone": {"kind": "exact", "normalizer": "phone"},
    }
    config = {
        "input": {"turtle": "hotels.ttl"},
        "domainSpec": "hotel_ds.json",
        "sources": [{"id": s, "kind": "fixture", "endpoint": f"sources/{s}.json"} for s in HOTEL_SOURCES],
        "weights": [1, 1, 1],
        "threshold": 0.5,
        "tripleThreshold": 0.5,
        "radiusM": 500,
        "similarity": similarity,
        "baseline": "baseline.csv",
    }

    # -- turtle ------------------------------------------------------------
    lines = [
        "# Synthetic hotel KG with injected errors (see ERRORS.md).",
        "@prefix schema: <http://schema.org/> .",
        "@prefix ex: <http://example.org/hotel/> .",
        "",
    ]
    for n, k in enumerate(kg):
        lines.append(f"ex:{k['id']} a schema:Hotel ;")
        lines.append(f"    schema:name {ttl_str(k['name'])} ;")
        lines.append(f"    schema:streetAddress {ttl_str(k['address'])} ;")
        lines.append(f"    schema:telephone {ttl_str(k['phone'])} ;")
        lines.append(f"    schema:url <http://example.org/web/{k['id']}> ;")
        if k["lat"] is None:
            lines[-1] = lines[-1][:-2] + " ."
        elif n % 2 == 0:
            lines.append(f"    schema:geo ex:{k['id']}-geo .")
            lines.append(f"ex:{k['id']}-geo a schema:GeoCoordinates ; schema:latitude {k['lat']} ; schema:longitude {k['lon']} .")
        else:
            lines.append(f"    schema:latitude {k['lat']} ;")
            lines.append(f"    schema:longitude \"{k['lon']}\" .")
        lines.append("")
    base = os.path.join(OUT, "hotels")
    write(os.path.join(base, "hotels.ttl"), "\n".join(lines))
    write(os.path.join(base, "hotel_ds.json"), json.dumps(ds, indent=2, ensure_ascii=False) + "\n")
    write(os.path.join(base, "config.json"), json.dumps(config, indent=2) + "\n")
    for s in HOTEL_SOURCES:
        write(os.path.join(base, "sources", f"{s}.json"),
              json.dumps({"sourceId": s, "records": sources[s]}, indent=2, ensure_ascii=False) + "\n")
    with open(os.path.join(base, "baseline.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject", "property", "correct"])
        for sid, prop, ok in labels:
            w.writerow([f"http://example.org/hotel/{sid}", prop, "true" if ok else "false"])
    write(os.path.join(base, "ERRORS.md"), "# Injected errors\n\n" + "\n".join(f"- {e}" for e in errors_doc) + "\n")

    # -- oracle: expected report ------------------------------------------
    alias = ds["aliases"]
    canon_sources = {}
    for s in HOTEL_SOURCES:
        recs = []
        for r in sources[s]:
            props = {}
            for key in sorted(r["properties"]):
                target = alias.get(s, {}).get(key, key if key in ds["properties"] else None)
                if target is None:
                    continue
                props.setdefault(target, []).extend(v.strip() for v in r["properties"][key] if v.strip())
            props.setdefault("name", [])
            props["name"] = [r["name"].strip()] + props["name"]
            recs.append({"id": r["id"], "name": r["name"].strip(), "lat": r["lat"], "lon": r["lon"], "props": props})
        canon_sources[s] = recs

    weights = [1.0, 1.0, 1.0]
    wsum = sum(weights)
    threshold = 0.5
    radius = 500.0
    instances = []
    skipped = []
    for k in sorted(kg, key=lambda k: "http://example.org/hotel/" + k["id"]):
        subject = "http://example.org/hotel/" + k["id"]
        if k["lat"] is None:
            skipped.append({"subject": subject, "reason": "insufficient matching properties"})
            continue
        qname = norm_name(k["name"])
        matches = []
        matched_rec = {}
        for s in HOTEL_SOURCES:
            hits = []
            for r in canon_sources[s]:
                if norm_name(r["name"]) != qname:
                    continue
                d = haversine(k["lat"], k["lon"], r["lat"], r["lon"])
                if d <= radius:
                    hits.append((d, r["id"], r))
            hits.sort(key=lambda t: (t[0], t[1]))
            if hits:
                d, rid, r = hits[0]
                matched_rec[s] = r
                matches.append({"sourceId": s, "matched": True, "recordId": rid, "distanceM": d,
                                "candidatesConsidered": len(hits), "error": None})
            else:
                matches.append({"sourceId": s, "matched": False, "recordId": None, "distanceM": None,
                                "candidatesConsidered": 0, "error": None})
        triples = []
        for prop in ds["properties"]:
            kgv = k[prop]
            per = []
            for s in HOTEL_SOURCES:
                r = matched_rec.get(s)
                vals = r["props"].get(prop, []) if r else []
                best, best_v = 0.0, None
                for v in vals:
                    x = sim(kgv, v, similarity[prop]["kind"], similarity[prop]["normalizer"])
                    if best_v is None or x > best:
                        best, best_v = x, v
                per.append({"sourceId": s, "matched": r is not None, "value": best_v, "sim": best})
            unweighted = 0.0
            acc = 0.0
            for p, w in zip(per, weights):
                unweighted += p["sim"]
                acc += p["sim"] * w
            triples.append({"property": prop, "subject": subject, "kgValue": kgv, "perSource": per,
                            "unweighted": unweighted, "weighted": acc / wsum})
        total = 0.0
        for t in triples:
            total += t["weighted"]
        conf = total / len(triples)
        instances.append({"subject": subject, "confidence": conf, "valid": conf > threshold, "threshold": threshold,
                          "triples": triples, "matches": matches})

    label_map = {(f"http://example.org/hotel/{sid}", prop): ok for sid, prop, ok in labels}
    per_prop = {}
    overall = []
    by_source = {s: [] for s in HOTEL_SOURCES}
    inst_pairs = []
    for inst in instances:
        truths = []
        for t in inst["triples"]:
            ok = label_map[(inst["subject"], t["property"])]
            pred = t["weighted"] > 0.5
            per_prop.setdefault(t["property"], []).append((pred, ok))
            overall.append((pred, ok))
            truths.append(ok)
            for p in t["perSource"]:
                by_source[p["sourceId"]].append((p["sim"] > 0.5, ok))
        inst_pairs.append((inst["valid"], all(truths)))
    metrics_doc = {
        "overall": metrics(overall),
        "perProperty": {p: metrics(v) for p, v in per_prop.items()},
        "recallBySource": {s: metrics(v)["recall"] for s, v in by_source.items()},
        "instance": metrics(inst_pairs),
        "notes": [],
        "unlabeled": 0,
    }
    report = {
        "config": {
            "domainSpec": "hotel",
            "input": "hotels.ttl",
            "properties": ds["properties"],
            "radiusM": radius,
            "similarity": similarity,
            "sources": [{"id": s, "kind": "fixture"} for s in HOTEL_SOURCES],
            "threshold": threshold,
            "tripleThreshold": 0.5,
            "weights": [w / wsum for w in weights],
        },
        "instances": instances,
        "skipped": skipped,
        "metrics": metrics_doc,
    }
    write(os.path.join(base, "expected_report.json"), canonical(report))
    csv_lines = ["property,precision,recall,f1"]
    for p in ds["properties"]:
        m = metrics_doc["perProperty"][p]
        csv_lines.append(f"{p},{r4(m['precision'])},{r4(m['recall'])},{r4(m['f1'])}")
    write(os.path.join(base, "expected_metrics.csv"), "\n".join(csv_lines) + "\n")
    return metrics_doc


# --------------------------------------------------------------------------
# politicians
# --------------------------------------------------------------------------

FIRST = ["Anna", "Karl", "Maria", "Josef", "Elena", "Luis", "Sofia", "Pedro", "Ingrid", "Hans", "Olga", "Marek",
         "Giulia", "Marco", "Helena", "Jan", "Zofia", "Ivan", "Clara", "Henri", "Amelie", "Tomas", "Rosa", "Diego",
         "Lena", "Felix", "Nora", "Bruno", "Irene", "Victor", "Marta", "Oskar", "Paula", "Emil", "Greta", "Hugo",
         "Alma", "Leon", "Ida", "Otto", "Vera", "Raul", "Nina", "Igor", "Lucia", "Anton", "Eva", "Milan", "Sara", "Boris",
         "Teresa", "Gustav", "Alba", "Pavel", "Ruth", "Kurt", "Elsa", "Ernesto", "Hanna", "Andrés"]
LAST = ["Müller", "Novak", "Rossi", "García", "Schmidt", "Kowalski", "Petrov", "Dubois", "Jensen", "Horvat", "Silva",
        "Bauer", "Costa", "Fischer", "Nagy", "Moreau", "Weber", "Lindqvist", "Romano", "Santos", "Keller", "Popescu",
        "Berger", "Ferrari", "Hofer", "Janssen", "Kovač", "Lehmann", "Martín", "Navarro", "Olsen", "Pichler", "Quintero",
        "Richter", "Sorensen", "Toth", "Urban", "Varga", "Winkler", "Zeman", "Aalto", "Brandt", "Conti", "Dvořák",
        "Eriksen", "Fuchs", "Gallo", "Haas", "Ibáñez", "Jovanović", "Koch", "Lang", "Mayer", "Nowak", "Ortiz", "Pavlov",
        "Ricci", "Stein", "Vogel", "Wolf"]

N_POLITICIANS = 2530
WIKIDATA_HITS = 1240  # 1240 / 2530 = 0.4901
DBPEDIA_HITS = 911    # 911 / 2530 = 0.3601


def gen_politicians():
    rng = random.Random(11341)
    combos = [(f, l) for f in FIRST for l in LAST]
    rng.shuffle(combos)
    people = []
    for i in range(N_POLITICIANS):
        f, l = combos[i]
        year = rng.randint(1850, 1990)
        people.append({"id": f"p{i + 1:04d}", "name": f"{f} {l}", "birth": f"{year}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}",
                       "year": str(year)})
    ids = list(range(N_POLITICIANS))
    wd = set(rng.sample(ids, WIKIDATA_HITS))
    db = set(rng.sample(ids, DBPEDIA_HITS))

    wikidata, dbpedia = [], []
    for i, p in enumerate(people):
        if i in wd:
            wikidata.append({"id": f"Q{100000 + i}", "name": p["name"], "properties": {"dateOfBirth": [p["birth"] + "T00:00:00Z"]}})
        elif rng.random() < 0.5:
            # present under a different birth year: never matches
            wikidata.append({"id": f"Q{100000 + i}", "name": p["name"], "properties": {"dateOfBirth": [f"{int(p['year']) + rng.randint(1, 9)}-01-01T00:00:00Z"]}})
        if i in db:
            dbpedia.append({"id": f"dbr:{p['name'].replace(' ', '_')}", "name": p["name"], "properties": {"birthYear": [p["year"]]}})
    for j in range(1000):
        f, l = combos[N_POLITICIANS + j]
        wikidata.append({"id": f"Q{900000 + j}", "name": f"{f} {l}", "properties": {"dateOfBirth": [f"{rng.randint(1850, 1990)}-06-01T00:00:00Z"]}})
    wikidata.sort(key=lambda r: r["id"])
    dbpedia.sort(key=lambda r: r["id"])

    ds = {
        "name": "politician",
        "targetType": "Person",
        "properties": ["name", "birthYear"],
        "matchingProperties": ["name", "birthYear"],
        "aliases": {"kg": {"birthDate": "birthYear"}, "wikidata": {"dateOfBirth": "birthYear"}},
    }
    config = {
        "input": {"turtle": "politicians.ttl"},
        "domainSpec": "person_ds.json",
        "sources": [{"id": "wikidata", "kind": "fixture", "endpoint": "sources/wikidata.json"},
                    {"id": "dbpedia", "kind": "fixture", "endpoint": "sources/dbpedia.json"}],
        "threshold": 0.5,
        "similarity": {"name": {"kind": "levenshtein-normalized", "normalizer": "name"},
                       "birthYear": {"kind": "exact", "normalizer": "year"}},
        "baseline": "baseline.csv",
    }
    lines = ["# Synthetic politician KG.", "@prefix schema: <http://schema.org/> .",
             "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .",
             "@prefix pp: <http://example.org/politician/> .", ""]
    for p in people:
        lines.append(f"pp:{p['id']} a schema:Person ; schema:name {ttl_str(p['name'])} ; schema:birthDate {ttl_str(p['birth'])} .")
    base = os.path.join(OUT, "politicians")
    write(os.path.join(base, "politicians.ttl"), "\n".join(lines) + "\n")
    write(os.path.join(base, "person_ds.json"), json.dumps(ds, indent=2) + "\n")
    write(os.path.join(base, "config.json"), json.dumps(config, indent=2) + "\n")
    write(os.path.join(base, "sources", "wikidata.json"), json.dumps({"sourceId": "wikidata", "records": wikidata}, indent=1, ensure_ascii=False) + "\n")
    write(os.path.join(base, "sources", "dbpedia.json"), json.dumps({"sourceId": "dbpedia", "records": dbpedia}, indent=1, ensure_ascii=False) + "\n")
    with open(os.path.join(base, "baseline.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject", "property", "correct"])
        for p in people:
            for prop in ds["properties"]:
                w.writerow([f"http://example.org/politician/{p['id']}", prop, "true"])
    expected = {"instances": N_POLITICIANS,
                "recallBySource": {"wikidata": WIKIDATA_HITS / N_POLITICIANS, "dbpedia": DBPEDIA_HITS / N_POLITICIANS}}
    write(os.path.join(base, "expected_recall.json"), json.dumps(expected, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    m = gen_hotels()
    for p, v in m["perProperty"].items():
        print(f"{p:8s} tp={v['tp']:2d} fp={v['fp']:2d} tn={v['tn']:2d} fn={v['fn']:2d} "
              f"p={v['precision']:.4f} r={v['recall']:.4f} f1={v['f1']:.4f}")
    print("recall by source", {k: round(x, 4) for k, x in m["recallBySource"].items()})
    gen_politicians()
