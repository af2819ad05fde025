"""Constants and statements taken from the literature rather than computed.

Every entry carries a short citation so reports can separate them from what
was machine-checked.
"""

# largest prime p for which a curve over some field of degree d may have a
# K-rational point of order p; None when no usable bound is recorded here
TORSION_P0 = {
    1: (7, "Mazur: rational torsion primes over Q"),
    2: (13, "Kamienny, Kenku-Momose: torsion primes over quadratic fields"),
    3: (13, "Parent: torsion primes over cubic fields"),
    4: (17, "Derickx-Kamienny-Stein-Stoll: torsion primes over quartic fields"),
    5: (19, "Derickx: torsion primes over quintic fields"),
    8: (6724, "Oesterle: (3^(d/2) + 1)^2 for d = 8"),
}

# field-specific statements replacing the degree bound
FIELD_TORSION_P0 = {
    "6.6.2803712.1": (23, "Derickx: no point of order p > 24 on elliptic curves over this sextic field"),
}

SMALL_EXPONENTS = {
    3: ((5, "Klassen-Tzermias"), (7, "Gross-Rohrlich"), (11, "Gross-Rohrlich")),
    5: ((7, "Tzermias"), (11, "Gross-Rohrlich")),
}

MODULARITY = "Freitas-Le Hung-Siksek: modularity of semistable curves with full 2-torsion (prime 5 or 7 argument)"
LEVEL_LOWERING = "Freitas-Siksek: level lowering for the Frey curve at level L"
NONRATIONAL_EIGENVALUE = "Dembele-Cremona: a non-rational Hecke field has a non-integral eigenvalue"
RAY_CLASS_STEP = "Serre: height one reduction at an unramified prime forces the isogeny character into a ray class field"
CUBIC_13 = "irreducibility at 13 for cubic fields with h+ = 1, 13 not dividing D_K R_K and 3 not inert (Mordell-Weil of X_0(26))"
CUBIC_MODULARITY = "modularity over real cubic fields with h+ = 1, 5 and 7 prime to D_K R_K, and 3 not inert"
