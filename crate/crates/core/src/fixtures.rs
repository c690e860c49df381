//! Bundled keyword-variant tables recovered from a production monitor's
//! narcotics search, used as grouping regression fixtures and as a default
//! known-keyword list. Each row is a root plus the surface forms observed
//! for it; hashtag forms keep their `#`.

/// Variant rows for keywords recovered as "necessary".
pub const NECESSARY_ROWS: &[(&str, &[&str])] = &[
    ("snow", &["#snow", "snow", "#crouchingtigerhiddensnowman", "#snowboard", "#snowday", "#snowinmarch"]),
    ("hop", &["hop", "hopping", "hops", "hopped", "#hops"]),
    ("high", &["high", "highland", "#highcbd", "skyhigh"]),
    ("line", &["line", "lining"]),
    ("party", &["party", "#monkeysparty", "#kidsparty", "#party", "#pizzaparty", "#birthdayparty", "#partyfoul"]),
    ("smoke", &["smoke", "smoking", "smoked"]),
    ("bowl", &["bowl", "bowling", "bowls"]),
    ("rock", &["rock", "rocked", "rocking", "rocks"]),
    ("face", &["face", "facing", "faces", "faced"]),
    ("cheese", &["cheese", "cheesy"]),
    ("bag", &["bag", "bags"]),
    ("jack", &["jack", "jacked"]),
    ("treat", &["treat", "treats"]),
    ("blast", &["blast", "blasted"]),
    ("fried", &["fried", "fries"]),
    ("crystal", &["crystal", "crystals"]),
    ("trip", &["tripped", "tripping", "trips"]),
    ("burger", &["burger", "burgers"]),
    ("cook", &["cooked", "cooking"]),
    ("dope", &["dope", "#dopeman"]),
    ("blow", &["blowing", "blow", "blower"]),
    ("wreck", &["wrecking", "wreck"]),
    ("bake", &["baking", "bake"]),
    ("waste", &["wasted", "wasting"]),
    ("gang", &["gang", "#canongang"]),
    ("hustle", &["hustled", "hustle"]),
    ("rip", &["rip", "#ripmicrophone"]),
];

/// Variant rows for keywords recovered as "likely".
pub const LIKELY_ROWS: &[(&str, &[&str])] = &[
    ("pie", &["pie", "#pieeatingcontest"]),
    ("pot", &["pot", "#pot", "#pothead", "#potfarm"]),
    ("zone", &["zone", "calzone"]),
    ("bud", &["bud", "budtender", "buds", "#budtenders"]),
    ("fade", &["fades", "faded", "#functionfades", "#faded"]),
    ("dabpro", &["#thedablab", "dabpro"]),
    ("bang", &["bang", "banged"]),
    ("deal", &["deal", "dealers", "deals", "dealt"]),
    ("indica", &["#indica", "indica"]),
    ("mash", &["mash", "mashed", "mashing"]),
    ("dank", &["dank", "#danksgiving"]),
    ("hip", &["hip", "hippie", "hipster"]),
    ("jam", &["jam", "#ujam", "jamming"]),
    ("angel", &["angel", "angeles"]),
    ("addict", &["addicts", "addict", "#slapaddictz"]),
    ("roller", &["roller", "#rollpipps", "rolled"]),
    ("#growweed", &["#growweed", "#weedagram"]),
    ("burn", &["burn", "burning"]),
    ("keg", &["kegs", "keg"]),
    ("malt", &["malt", "malts"]),
    ("melt", &["melt", "melting"]),
];

/// Variant rows for the keywords known directly from log metadata. The
/// first form in each row is the keyword as it appeared in the metadata.
pub const KNOWN_ROWS: &[(&str, &[&str])] = &[
    ("angel", &["angel", "angeles"]),
    ("blast", &["blast", "blasted"]),
    ("blow", &["blow", "blowing", "blower"]),
    ("bowl", &["bowl", "bowling", "bowls"]),
    ("broken", &["broken"]),
    ("burn", &["burned", "burn", "burning"]),
    ("cheese", &["cheese", "cheesy"]),
    ("cook", &["cooked", "cooking"]),
    ("crystal", &["crystal", "crystals"]),
    ("dope", &["dope", "#dopeman"]),
    ("face", &["faced", "face", "facing", "faces"]),
    ("fade", &["faded", "fades", "#functionfades", "#faded"]),
    ("fried", &["fried", "fries"]),
    ("high", &["high", "highland", "#highcbd", "skyhigh", "highness"]),
    ("hookup", &["hookup"]),
    ("hop", &["hopped", "hop", "hops", "hopping", "#hops"]),
    ("indica", &["indica", "#indica"]),
    ("line", &["line", "lining"]),
    ("load", &["loaded", "loading"]),
    ("mash", &["mashed", "mash", "mashing"]),
    ("munchies", &["munchies", "munchys"]),
    ("party", &["party", "#monkeysparty", "#kidsparty", "#party", "#pizzaparty", "#birthdayparty", "#partyfoul"]),
    ("pied", &["pied", "pie", "#pieeatingcontest"]),
    ("pot", &["pot", "#pot", "#pothead", "#potfarm"]),
    ("rock", &["rock", "rocked", "rocking", "rocks"]),
    ("smoke", &["smoke", "smoking", "smoked"]),
    ("snow", &["snow", "#snow", "#crouchingtigerhiddensnowman", "#snowboard", "#snowday", "#snowinmarch"]),
    ("stash", &["stash"]),
    ("stuck", &["stuck"]),
    ("track", &["tracks", "track", "tracked"]),
    ("trip", &["trip", "tripped", "tripping", "trips"]),
    ("tweed", &["tweed"]),
    ("waste", &["wasted", "wasting"]),
    ("wreck", &["wreck", "wrecking", "wrecked"]),
    ("yay", &["yay"]),
    ("zone", &["zoned", "zone", "calzone"]),
];

/// The 39 keywords observed in log metadata: one per [`KNOWN_ROWS`] row,
/// plus a second form for the hop, burn and waste rows.
pub const KNOWN_KEYWORDS: &[&str] = &[
    "angel", "blast", "blow", "bowl", "broken", "burned", "cheese", "cooked", "crystal", "dope",
    "faced", "faded", "fried", "high", "hookup", "hopped", "indica", "line", "loaded", "mashed",
    "munchies", "party", "pied", "pot", "rock", "smoke", "snow", "stash", "stuck", "tracks",
    "trip", "tweed", "wasted", "wreck", "yay", "zoned", "hop", "burn", "wasting",
];

/// All variant rows across the three tables, in order.
pub fn variant_rows() -> impl Iterator<Item = (&'static str, &'static [&'static str])> {
    NECESSARY_ROWS
        .iter()
        .chain(LIKELY_ROWS.iter())
        .chain(KNOWN_ROWS.iter())
        .copied()
}
