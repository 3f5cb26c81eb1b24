"""Writes the CSV/XES fixtures and prints oracle counts used by the tests.

The counts are computed here, independently of the C++ parser, and frozen
into the test sources.
"""
import datetime as dt
import random

UTC = dt.timezone.utc


def iso(t, offset_hours=0):
    tz = dt.timezone(dt.timedelta(hours=offset_hours))
    return t.astimezone(tz).isoformat()


def write_csv(path, rows):
    with open(path, "w", newline="") as f:
        f.write("case_id,activity,start,end\n")
        for r in rows:
            f.write(",".join(r) + "\n")


base = dt.datetime(2024, 3, 1, 10, 0, tzinfo=UTC)

# sequence.csv: x, y, z back to back.
write_csv("sequence.csv", [
    ("c1", "x", iso(base), iso(base + dt.timedelta(minutes=10))),
    ("c1", "y", iso(base + dt.timedelta(minutes=10)), iso(base + dt.timedelta(minutes=20))),
    ("c1", "z", iso(base + dt.timedelta(minutes=20)), iso(base + dt.timedelta(minutes=30))),
])

# ten_cases.csv: 100 rows over 10 cases, rows interleaved, mixed UTC offsets.
rng = random.Random(20240301)
activities = ["ad_tag_setup", "beacon_check", "click_tracking", "creative_delivery",
              "io_review", "launch", "pacing_review", "report_discrepancy"]
rows = []
durations = {}
for c in range(10):
    t = base + dt.timedelta(days=c)
    for k in range(10):
        a = rng.choice(activities)
        d = rng.randint(0, 7200)
        w = rng.randint(0, 1800)
        start = t + dt.timedelta(seconds=w)
        end = start + dt.timedelta(seconds=d)
        t = end
        rows.append((f"io-{c:03d}", a, iso(start, rng.choice([0, 1, -5])), iso(end, rng.choice([0, 2]))))
        durations.setdefault(a, []).append(d)
rng.shuffle(rows)
write_csv("ten_cases.csv", rows)
print("ten_cases rows", len(rows), "cases", len({r[0] for r in rows}))
print("ten_cases alphabet", sorted({r[1] for r in rows}))
for a in sorted(durations):
    print("ten_cases mean", a, repr(sum(durations[a]) / len(durations[a])))

# twin.csv / twin.xes: 2 traces, 5 events; one zero-duration event.
twin = [
    ("t1", "x", "2024-03-01T10:00:00+00:00", "2024-03-01T10:30:00+00:00"),
    ("t1", "y", "2024-03-01T10:45:00+00:00", "2024-03-01T11:00:00+00:00"),
    ("t1", "z", "2024-03-01T11:00:00+00:00", "2024-03-01T11:00:00+00:00"),
    ("t2", "x", "2024-03-02T09:00:00+00:00", "2024-03-02T09:10:00+00:00"),
    ("t2", "z", "2024-03-02T09:30:00+00:00", "2024-03-02T09:50:00+00:00"),
]
write_csv("twin.csv", twin)


def xes_event(name, stamp, transition=None):
    s = '    <event>\n'
    s += f'      <string key="concept:name" value="{name}"/>\n'
    if transition:
        s += f'      <string key="lifecycle:transition" value="{transition}"/>\n'
    s += f'      <date key="time:timestamp" value="{stamp}"/>\n'
    s += '    </event>\n'
    return s


with open("twin.xes", "w") as f:
    f.write('<?xml version="1.0" encoding="UTF-8"?>\n<log xes.version="1.0">\n')
    f.write('  <trace>\n    <string key="concept:name" value="t1"/>\n')
    f.write(xes_event("x", "2024-03-01T11:00:00.000+01:00", "start"))
    f.write(xes_event("x", "2024-03-01T11:30:00.000+01:00", "complete"))
    f.write(xes_event("y", "2024-03-01T10:45:00.000Z", "start"))
    f.write(xes_event("y", "2024-03-01T11:00:00.000Z", "complete"))
    f.write(xes_event("z", "2024-03-01T11:00:00.000Z"))
    f.write('  </trace>\n')
    f.write('  <trace>\n    <string key="concept:name" value="t2"/>\n')
    f.write(xes_event("x", "2024-03-02T09:00:00Z", "start"))
    f.write(xes_event("x", "2024-03-02T09:10:00Z", "complete"))
    f.write(xes_event("z", "2024-03-02T09:30:00Z", "start"))
    f.write(xes_event("z", "2024-03-02T09:50:00Z", "complete"))
    f.write('  </trace>\n</log>\n')

# rework.csv: x a b a b y.
seq = ["x", "a", "b", "a", "b", "y"]
write_csv("rework.csv", [
    ("r1", s, iso(base + dt.timedelta(minutes=10 * k)), iso(base + dt.timedelta(minutes=10 * k + 5)))
    for k, s in enumerate(seq)
])

# loop_free.csv: 6 cases over a small choice structure, no repeats.
paths = [["receive_io", "ad_tag_setup", "creative_delivery", "launch"],
         ["receive_io", "creative_delivery", "ad_tag_setup", "launch"],
         ["receive_io", "ad_tag_setup", "launch"]]
rows = []
for c in range(6):
    t = base + dt.timedelta(days=c)
    for s in paths[c % 3]:
        rows.append((f"lf-{c}", s, iso(t), iso(t + dt.timedelta(minutes=40))))
        t += dt.timedelta(minutes=50)
write_csv("loop_free.csv", rows)

# delay.csv: one 30-minute gap between x and y, the rest back to back.
write_csv("delay.csv", [
    ("d1", "w", "2024-03-01T09:00:00+00:00", "2024-03-01T09:50:00+00:00"),
    ("d1", "x", "2024-03-01T09:55:00+00:00", "2024-03-01T10:00:00+00:00"),
    ("d1", "y", "2024-03-01T10:30:00+00:00", "2024-03-01T10:40:00+00:00"),
    ("d1", "z", "2024-03-01T10:40:00+00:00", "2024-03-01T10:50:00+00:00"),
])

# bad_order.csv: end before start on data row 2.
write_csv("bad_order.csv", [
    ("b1", "x", "2024-03-01T10:00:00+00:00", "2024-03-01T10:10:00+00:00"),
    ("b1", "y", "2024-03-01T10:20:00+00:00", "2024-03-01T10:15:00+00:00"),
])

with open("partition_missing.json", "w") as f:
    f.write('[["x", "y"]]\n')
with open("partition_overlap.json", "w") as f:
    f.write('[["x", "y"], ["y", "z"]]\n')
