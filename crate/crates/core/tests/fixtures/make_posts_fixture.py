"""Regenerate posts_fixture.xml and its expected-post listing.

Run from this directory: python3 make_posts_fixture.py
"""
import random
from xml.sax.saxutils import quoteattr

rng = random.Random(20230430)

THEMES = {
    "gradle": {
        "tags": ["android", "gradle", "android-gradle-plugin"],
        "titles": [
            "Gradle sync fails with Could not resolve com.android.tools.build:gradle",
            "Execution failed for task ':app:mergeDebugResources'",
            "Duplicate class found in modules after adding a dependency",
            "Build fails after updating the Android Gradle plugin",
            "Gradle project sync error: minCompileSdk is higher than compileSdk",
            "Unable to build project after migrating to AndroidX",
            "Gradle build takes forever on a clean project",
            "Manifest merger failed with multiple errors",
            "Could not find method implementation() for arguments",
            "Kotlin version mismatch breaks the Gradle build",
            "Build error: Cannot fit requested classes in a single dex file",
            "Gradle daemon disappeared unexpectedly during build",
            "Project build error after upgrading to Java 17",
            "Error inflating build variants in Gradle project",
            "Gradle cannot find the Android SDK location",
        ],
        "sentences": [
            "The project built fine yesterday but now Gradle sync fails.",
            "I updated the Android Gradle plugin to the latest version.",
            "The error points at the build.gradle file of the app module.",
            "Cleaning the project and invalidating caches did not help.",
            "The same build works on another machine with the same project.",
            "I tried changing the Gradle wrapper version as well.",
            "The build log shows a dependency resolution error for the project.",
            "Our CI server reports the same Gradle error on every build.",
        ],
        "fixes": [
            "Add google() to the repositories block in the root build.gradle file.",
            "The Gradle plugin requires a newer Gradle wrapper version.",
            "Update distributionUrl in gradle-wrapper.properties and sync the project again.",
            "Enable multidex in the defaultConfig block of the app module.",
            "Exclude the duplicate module from one of the dependencies.",
            "Set the JDK used by Gradle to version 11 in the project structure dialog.",
        ],
        "code": [
            "buildscript {\n    repositories {\n        google()\n        mavenCentral()\n    }\n}",
            "distributionUrl=https\\://services.gradle.org/distributions/gradle-7.5-bin.zip",
            "android {\n    defaultConfig {\n        multiDexEnabled true\n    }\n}",
        ],
    },
    "emulator": {
        "tags": ["android", "android-emulator", "adb"],
        "titles": [
            "Jenkins tries to launch emulator and hangs",
            "Android emulator does not start on Windows with HAXM",
            "adb devices shows the emulator as offline",
            "Emulator is extremely slow on macOS",
            "The emulator process was killed after starting",
            "Cannot install APK on emulator: INSTALL_FAILED_INSUFFICIENT_STORAGE",
            "Emulator shows a black screen after boot",
            "AVD manager does not list any system images",
            "Emulator networking does not reach localhost of the host",
            "Hardware acceleration is not available for the emulator",
            "Emulator crashes when the camera is opened",
            "Running instrumentation tests on emulator under CI fails",
            "Emulator keyboard input does not work",
            "Cold boot of the emulator takes minutes",
            "Emulator cannot be launched from Android Studio",
        ],
        "sentences": [
            "The emulator starts but never finishes booting.",
            "Our Jenkins job launches the emulator before running tests.",
            "Logcat shows no output while the emulator hangs.",
            "HAXM is installed and virtualization is enabled in the BIOS.",
            "The same AVD works on my colleague's machine.",
            "I created a fresh virtual device with the latest system image.",
            "The adb server restarts but the device stays offline.",
            "CPU usage goes to one hundred percent while the emulator boots.",
        ],
        "fixes": [
            "The emulator plugin is not compatible with the new SDK tools layout.",
            "Point the plugin at the legacy tools directory or downgrade it.",
            "Use an x86_64 system image and enable hardware acceleration.",
            "Wipe the AVD data and perform a cold boot.",
            "Restart the adb server with adb kill-server followed by adb start-server.",
            "Use 10.0.2.2 to reach the host machine from the emulator.",
        ],
        "code": [
            "emulator -avd Pixel_API_30 -no-window -no-audio -gpu swiftshader_indirect",
            "adb kill-server\nadb start-server\nadb devices",
            "sdkmanager \"system-images;android-30;google_apis;x86_64\"",
        ],
    },
    "recyclerview": {
        "tags": ["android", "android-recyclerview", "kotlin"],
        "titles": [
            "RecyclerView does not display any items",
            "notifyDataSetChanged does not refresh the RecyclerView",
            "RecyclerView scroll position resets after update",
            "Items in RecyclerView are duplicated when scrolling",
            "RecyclerView inside NestedScrollView loads all items at once",
            "How to add click listener to RecyclerView items",
            "ListAdapter submitList does not update the list",
            "RecyclerView item animation flickers on change",
            "GridLayoutManager spans are wrong on tablets",
            "ViewHolder shows data from the wrong position",
            "RecyclerView height wrap_content does not work",
            "Swipe to delete in RecyclerView removes the wrong item",
            "DiffUtil callback is never called",
            "RecyclerView lags with images loaded from network",
            "Empty view for RecyclerView is not shown",
        ],
        "sentences": [
            "The adapter receives the list but the RecyclerView stays empty.",
            "I call notifyDataSetChanged after adding new items to the list.",
            "The layout manager is set in onCreate of the activity.",
            "Scrolling the list shows items from other positions.",
            "The item layout uses a ConstraintLayout with an ImageView.",
            "Data comes from a ViewModel that exposes LiveData.",
            "Debugging shows that getItemCount returns the right size.",
            "The problem appears only on devices with Android 12.",
        ],
        "fixes": [
            "Set a LayoutManager on the RecyclerView before assigning the adapter.",
            "Submit a new list instance to ListAdapter instead of mutating the old one.",
            "Bind every view in onBindViewHolder so recycled views are reset.",
            "Use DiffUtil to compute the changes instead of notifyDataSetChanged.",
            "Give the RecyclerView a fixed height or use match_parent.",
            "Load images with a library that caches bitmaps.",
        ],
        "code": [
            "recyclerView.layoutManager = LinearLayoutManager(this)\nrecyclerView.adapter = adapter",
            "adapter.submitList(items.toList())",
            "override fun onBindViewHolder(holder: VH, position: Int) {\n    holder.bind(getItem(position))\n}",
        ],
    },
    "permissions": {
        "tags": ["android", "android-permissions", "java"],
        "titles": [
            "SecurityException: Permission Denial when opening a file",
            "onRequestPermissionsResult is never called",
            "WRITE_EXTERNAL_STORAGE has no effect on Android 11",
            "Camera permission dialog does not appear",
            "Location permission is denied without asking the user",
            "How to request runtime permissions from a fragment",
            "Background location permission request is ignored",
            "App crashes when reading contacts without permission",
            "Notification permission on Android 13 is not requested",
            "shouldShowRequestPermissionRationale always returns false",
            "Permission granted but the feature still fails",
            "Bluetooth permissions changed in Android 12",
            "Scoped storage breaks access to the Downloads folder",
            "Requesting multiple permissions at once",
            "Permission denied when accessing the SD card",
        ],
        "sentences": [
            "The app crashes with a SecurityException on newer devices.",
            "I declared the permission in the manifest file.",
            "The permission dialog never shows up on the device.",
            "The callback for the permission request is not triggered.",
            "This works on Android 9 but fails on Android 11.",
            "The user already granted the permission in the settings.",
            "I request the permission from a fragment inside the activity.",
            "The code checks the permission before opening the camera.",
        ],
        "fixes": [
            "Request the permission at runtime with the Activity Result API.",
            "Declare the permission in the manifest and also request it at runtime.",
            "On Android 11 use the MediaStore API instead of direct file paths.",
            "Call requestPermissions on the fragment so the fragment receives the callback.",
            "Add the new Bluetooth permissions introduced in Android 12 to the manifest.",
            "Check shouldShowRequestPermissionRationale only after the first denial.",
        ],
        "code": [
            "registerForActivityResult(new ActivityResultContracts.RequestPermission(), granted -> {\n    if (granted) openCamera();\n});",
            "<uses-permission android:name=\"android.permission.CAMERA\" />",
            "if (ContextCompat.checkSelfPermission(this, Manifest.permission.CAMERA)\n        != PackageManager.PERMISSION_GRANTED) { /* ask */ }",
        ],
    },
}


def ts(year, month, day, hour):
    return f"{year:04d}-{month:02d}-{day:02d}T{hour:02d}:{rng.randrange(60):02d}:{rng.randrange(60):02d}.{rng.randrange(1000):03d}"


def body(paragraphs, code):
    html = "".join(f"<p>{p}</p>\n" for p in paragraphs)
    for c in code:
        esc = c.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        html += f"<pre><code>{esc}\n</code></pre>\n"
    return html


rows = []        # (xml_line)
expected = []    # (id, kind, parent, score, accepted, tags)
next_id = 1000
questions = []
theme_names = list(THEMES)
for i in range(60):
    theme = THEMES[theme_names[i % 4]]
    k = i // 4
    qid = next_id
    next_id += 1
    title = theme["titles"][k]
    sents = rng.sample(theme["sentences"], rng.randrange(2, 5))
    if k % 5 == 0:
        sents.append("Any idea what &amp; why this happens?")
    code = [rng.choice(theme["code"])] if rng.random() < 0.4 else []
    # the first two questions of each theme are well voted
    score = rng.randrange(4, 30) if k < 2 else rng.randrange(-2, 12)
    year = 2012 + (i * 7) % 11
    questions.append({"id": qid, "theme": theme, "title": title, "sents": sents, "code": code,
                      "score": score, "created": ts(year, 1 + i % 12, 1 + i % 27, i % 24), "k": k,
                      "answers": []})

# 38 answers: two for each of the first 8 questions of every theme (k < 2 gets
# an accepted one with code), one for the remaining ones until 38 are placed
plan = []
for q in questions:
    if q["k"] < 2:
        plan.append((q, 2))
for q in questions:
    if q["k"] >= 2 and sum(n for _, n in plan) < 38:
        plan.append((q, 1))
assert sum(n for _, n in plan) == 38
for q, n in plan:
    for j in range(n):
        aid = next_id
        next_id += 1
        theme = q["theme"]
        fixes = rng.sample(theme["fixes"], rng.randrange(2, 4))
        code = [rng.choice(theme["code"])] if (q["k"] < 2 and j == 0) or rng.random() < 0.3 else []
        score = rng.randrange(0, 25) if j == 0 else rng.randrange(0, 4)
        q["answers"].append({"id": aid, "fixes": fixes, "code": code, "score": score})
    if q["k"] < 2 or rng.random() < 0.4:
        q["accepted"] = q["answers"][0]["id"]

for idx, q in enumerate(questions):
    tags = q["theme"]["tags"]
    tag_attr = "".join(f"<{t}>" for t in tags) if idx % 10 else "|" + "|".join(tags) + "|"
    attrs = [("Id", str(q["id"])), ("PostTypeId", "1")]
    if "accepted" in q:
        attrs.append(("AcceptedAnswerId", str(q["accepted"])))
    attrs += [("CreationDate", q["created"]), ("Score", str(q["score"])),
              ("Body", body(q["sents"], q["code"])), ("Title", q["title"]), ("Tags", tag_attr)]
    rows.append(attrs)
    expected.append((q["id"], "question", "", q["score"], q.get("accepted", ""), ";".join(tags)))
    for a in q["answers"]:
        attrs = [("Id", str(a["id"])), ("PostTypeId", "2"), ("ParentId", str(q["id"])),
                 ("CreationDate", q["created"][:11] + "23:59:59.000"),
                 ("Score", str(a["score"])), ("Body", body(a["fixes"], a["code"]))]
        rows.append(attrs)
        expected.append((a["id"], "answer", q["id"], a["score"], "", ""))

malformed = [
    [("Id", "not-a-number"), ("PostTypeId", "1"), ("CreationDate", "2015-03-01T10:00:00.000"), ("Score", "1"),
     ("Body", "<p>Broken id.</p>"), ("Title", "Broken"), ("Tags", "<android>")],
    [("Id", str(next_id)), ("PostTypeId", "2"), ("ParentId", "1000"), ("CreationDate", "yesterday"),
     ("Score", "0"), ("Body", "<p>Broken date.</p>")],
]
rows.insert(17, malformed[0])
rows.insert(71, malformed[1])
assert len(rows) == 100


def attr_value(v):
    return quoteattr(v, {"\n": "&#xA;", "\r": "&#xD;"})


with open("posts_fixture.xml", "w", encoding="utf-8") as f:
    f.write('<?xml version="1.0" encoding="utf-8"?>\n<posts>\n')
    for attrs in rows:
        f.write("  <row " + " ".join(f"{k}={attr_value(v)}" for k, v in attrs) + " />\n")
    f.write("</posts>\n")

with open("posts_fixture_expected.tsv", "w", encoding="utf-8") as f:
    f.write("id\tkind\tparent\tscore\taccepted\ttags\n")
    for e in sorted(expected):
        f.write("\t".join(str(x) for x in e) + "\n")
