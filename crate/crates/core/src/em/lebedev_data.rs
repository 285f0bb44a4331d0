// Generated by scripts/gen_lebedev.py; do not edit by hand.
//
// Each row is one octahedral orbit: (orbit type, a, b, weight), with weights
// normalised to sum to one over the sphere.

use super::lebedev::{Orbit, RuleTable};

pub(crate) static RULES: &[RuleTable] = &[
    RuleTable {
        points: 6,
        degree: 3,
        orbits: &[
            Orbit { kind: 1, a: 0.0, b: 0.0, weight: 0.1666666666666667 },
        ],
    },
    RuleTable {
        points: 14,
        degree: 5,
        orbits: &[
            Orbit { kind: 1, a: 0.0, b: 0.0, weight: 0.06666666666666667 },
            Orbit { kind: 3, a: 0.0, b: 0.0, weight: 0.075 },
        ],
    },
    RuleTable {
        points: 26,
        degree: 7,
        orbits: &[
            Orbit { kind: 1, a: 0.0, b: 0.0, weight: 0.04761904761904762 },
            Orbit { kind: 2, a: 0.0, b: 0.0, weight: 0.0380952380952381 },
            Orbit { kind: 3, a: 0.0, b: 0.0, weight: 0.03214285714285714 },
        ],
    },
    RuleTable {
        points: 50,
        degree: 11,
        orbits: &[
            Orbit { kind: 1, a: 0.0, b: 0.0, weight: 0.0126984126984127 },
            Orbit { kind: 2, a: 0.0, b: 0.0, weight: 0.02257495590828924 },
            Orbit { kind: 3, a: 0.0, b: 0.0, weight: 0.02109375 },
            Orbit { kind: 4, a: 0.3015113445777636, b: 0.0, weight: 0.02017333553791887 },
        ],
    },
    RuleTable {
        points: 86,
        degree: 15,
        orbits: &[
            Orbit { kind: 1, a: 0.0, b: 0.0, weight: 0.01154401154401154 },
            Orbit { kind: 3, a: 0.0, b: 0.0, weight: 0.01194390908585628 },
            Orbit { kind: 4, a: 0.3696028464541502, b: 0.0, weight: 0.0111105557106034 },
            Orbit { kind: 4, a: 0.6943540066026664, b: 0.0, weight: 0.01187650129453714 },
            Orbit { kind: 5, a: 0.3742430390903412, b: 0.0, weight: 0.01181230374690448 },
        ],
    },
    RuleTable {
        points: 110,
        degree: 17,
        orbits: &[
            Orbit { kind: 1, a: 0.0, b: 0.0, weight: 0.003828270494937162 },
            Orbit { kind: 3, a: 0.0, b: 0.0, weight: 0.009793737512487513 },
            Orbit { kind: 4, a: 0.1851156353447362, b: 0.0, weight: 0.008211737283191111 },
            Orbit { kind: 4, a: 0.6904210483822922, b: 0.0, weight: 0.009942814891178103 },
            Orbit { kind: 4, a: 0.3956894730559419, b: 0.0, weight: 0.009595471336070962 },
            Orbit { kind: 5, a: 0.4783690288121502, b: 0.0, weight: 0.009694996361663029 },
        ],
    },
    RuleTable {
        points: 146,
        degree: 19,
        orbits: &[
            Orbit { kind: 1, a: 0.0, b: 0.0, weight: 0.0005996313688621381 },
            Orbit { kind: 2, a: 0.0, b: 0.0, weight: 0.007372999718620756 },
            Orbit { kind: 3, a: 0.0, b: 0.0, weight: 0.007210515360144488 },
            Orbit { kind: 4, a: 0.6764410400114264, b: 0.0, weight: 0.007116355493117555 },
            Orbit { kind: 4, a: 0.4174961227965453, b: 0.0, weight: 0.006753829486314477 },
            Orbit { kind: 4, a: 0.1574676672039082, b: 0.0, weight: 0.007574394159054034 },
            Orbit { kind: 6, a: 0.1403553811713183, b: 0.4493328323269557, weight: 0.006991087353303262 },
        ],
    },
    RuleTable {
        points: 194,
        degree: 23,
        orbits: &[
            Orbit { kind: 1, a: 0.0, b: 0.0, weight: 0.001782340447244611 },
            Orbit { kind: 2, a: 0.0, b: 0.0, weight: 0.005716905949977102 },
            Orbit { kind: 3, a: 0.0, b: 0.0, weight: 0.005573383178848738 },
            Orbit { kind: 4, a: 0.6712973442695226, b: 0.0, weight: 0.005608704082587997 },
            Orbit { kind: 4, a: 0.2892465627575439, b: 0.0, weight: 0.005158237711805383 },
            Orbit { kind: 4, a: 0.4446933178717437, b: 0.0, weight: 0.005518771467273614 },
            Orbit { kind: 4, a: 0.1299335447650067, b: 0.0, weight: 0.004106777028169394 },
            Orbit { kind: 5, a: 0.3457702197611283, b: 0.0, weight: 0.005051846064614808 },
            Orbit { kind: 6, a: 0.159041710538353, b: 0.8360360154824589, weight: 0.005530248916233094 },
        ],
    },
    RuleTable {
        points: 302,
        degree: 29,
        orbits: &[
            Orbit { kind: 1, a: 0.0, b: 0.0, weight: 0.0008545911725128148 },
            Orbit { kind: 3, a: 0.0, b: 0.0, weight: 0.003599119285025571 },
            Orbit { kind: 4, a: 0.3515640345570105, b: 0.0, weight: 0.003449788424305883 },
            Orbit { kind: 4, a: 0.6566329410219612, b: 0.0, weight: 0.003604822601419882 },
            Orbit { kind: 4, a: 0.4729054132581005, b: 0.0, weight: 0.003576729661743367 },
            Orbit { kind: 4, a: 0.09618308522614784, b: 0.0, weight: 0.002352101413689164 },
            Orbit { kind: 4, a: 0.2219645236294178, b: 0.0, weight: 0.003108953122413675 },
            Orbit { kind: 4, a: 0.7011766416089545, b: 0.0, weight: 0.003650045807677255 },
            Orbit { kind: 5, a: 0.2644152887060663, b: 0.0, weight: 0.002982344963171804 },
            Orbit { kind: 5, a: 0.5718955891878961, b: 0.0, weight: 0.00360082093221646 },
            Orbit { kind: 6, a: 0.2510034751770465, b: 0.8000727494073951, weight: 0.003571540554273387 },
            Orbit { kind: 6, a: 0.1233548532583327, b: 0.4127724083168531, weight: 0.00339231220500617 },
        ],
    },
    RuleTable {
        points: 590,
        degree: 41,
        orbits: &[
            Orbit { kind: 1, a: 0.0, b: 0.0, weight: 0.0003095121295306187 },
            Orbit { kind: 3, a: 0.0, b: 0.0, weight: 0.001852379698597489 },
            Orbit { kind: 4, a: 0.7040954938227469, b: 0.0, weight: 0.001871790639277744 },
            Orbit { kind: 4, a: 0.6807744066455244, b: 0.0, weight: 0.001858812585438317 },
            Orbit { kind: 4, a: 0.6372546939258752, b: 0.0, weight: 0.001852028828296213 },
            Orbit { kind: 4, a: 0.5044419707800358, b: 0.0, weight: 0.001846715956151242 },
            Orbit { kind: 4, a: 0.4215761784010967, b: 0.0, weight: 0.001818471778162769 },
            Orbit { kind: 4, a: 0.3317920736472123, b: 0.0, weight: 0.001749564657281154 },
            Orbit { kind: 4, a: 0.2384736701421887, b: 0.0, weight: 0.001617210647254411 },
            Orbit { kind: 4, a: 0.1459036449157763, b: 0.0, weight: 0.001384737234851692 },
            Orbit { kind: 4, a: 0.06095034115507196, b: 0.0, weight: 0.000976433116505105 },
            Orbit { kind: 5, a: 0.6116843442009876, b: 0.0, weight: 0.001857161196774078 },
            Orbit { kind: 5, a: 0.3964755348199858, b: 0.0, weight: 0.001705153996395864 },
            Orbit { kind: 5, a: 0.1724782009907724, b: 0.0, weight: 0.001300321685886048 },
            Orbit { kind: 6, a: 0.561026380862206, b: 0.3518280927733519, weight: 0.001842866472905286 },
            Orbit { kind: 6, a: 0.474239284255198, b: 0.263471665593795, weight: 0.001802658934377451 },
            Orbit { kind: 6, a: 0.598412649788538, b: 0.1816640840360209, weight: 0.00184983056044366 },
            Orbit { kind: 6, a: 0.3791035407695563, b: 0.1720795225656878, weight: 0.001713904507106709 },
            Orbit { kind: 6, a: 0.2778673190586244, b: 0.08213021581932511, weight: 0.001555213603396808 },
            Orbit { kind: 6, a: 0.5033564271075117, b: 0.08999205842074876, weight: 0.001802239128008525 },
        ],
    },
];
