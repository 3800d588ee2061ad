//! The relation vocabulary: canonical relation names, their expansions into
//! primitive steps, spelling aliases, alternative readings for polysemous
//! words, and structural naming of a person relative to an anchor.

use serde::{Deserialize, Serialize};

use super::graph::{FamilyGraph, Gender, PersonId};

/// One hop in a relation expansion. The gender is a filter on the person the
/// step arrives at; `Unknown` means unfiltered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimitiveStep {
    Parent(Gender),
    Child(Gender),
    Spouse(Gender),
    Sibling(Gender),
}

/// Canonical relation names covering the substitution-table vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CanonicalRelation {
    Selfsame,
    Husband,
    Wife,
    Father,
    Mother,
    Son,
    Daughter,
    Brother,
    Sister,
    Grandfather,
    Grandmother,
    MaternalGrandfather,
    MaternalGrandmother,
    Grandson,
    Granddaughter,
    GreatGrandfather,
    GreatGrandmother,
    GreatGrandson,
    GreatGranddaughter,
    Uncle,
    Aunt,
    MaternalUncle,
    MaternalAunt,
    PaternalUncle,
    PaternalAunt,
    Nephew,
    Niece,
    Cousin,
    CousinBrother,
    CousinSister,
    FatherInLaw,
    MotherInLaw,
    BrotherInLaw,
    SisterInLaw,
    SonInLaw,
    DaughterInLaw,
    GranddaughterInLaw,
}

use CanonicalRelation::*;
use Gender::{Female as F, Male as M, Unknown as U};
use PrimitiveStep::{Child, Parent, Sibling, Spouse};

/// A named way of reading a relation word: how to recognize existing
/// referents (`matches`, inclusive) and how to introduce a fresh one
/// (`builds`, the default lineage).
#[derive(Debug, Clone)]
pub struct Reading {
    pub label: &'static str,
    pub matches: &'static [PrimitiveStep],
    pub builds: &'static [PrimitiveStep],
}

macro_rules! reading {
    ($label:expr, $m:expr, $b:expr) => {
        Reading {
            label: $label,
            matches: $m,
            builds: $b,
        }
    };
    ($label:expr, $both:expr) => {
        Reading {
            label: $label,
            matches: $both,
            builds: $both,
        }
    };
}

impl CanonicalRelation {
    /// Canonical hyphenated name, e.g. `"sister-in-law"`.
    pub fn name(self) -> &'static str {
        match self {
            Selfsame => "self",
            Husband => "husband",
            Wife => "wife",
            Father => "father",
            Mother => "mother",
            Son => "son",
            Daughter => "daughter",
            Brother => "brother",
            Sister => "sister",
            Grandfather => "grandfather",
            Grandmother => "grandmother",
            MaternalGrandfather => "maternal-grandfather",
            MaternalGrandmother => "maternal-grandmother",
            Grandson => "grandson",
            Granddaughter => "granddaughter",
            GreatGrandfather => "great-grandfather",
            GreatGrandmother => "great-grandmother",
            GreatGrandson => "great-grandson",
            GreatGranddaughter => "great-granddaughter",
            Uncle => "uncle",
            Aunt => "aunt",
            MaternalUncle => "maternal-uncle",
            MaternalAunt => "maternal-aunt",
            PaternalUncle => "paternal-uncle",
            PaternalAunt => "paternal-aunt",
            Nephew => "nephew",
            Niece => "niece",
            Cousin => "cousin",
            CousinBrother => "cousin-brother",
            CousinSister => "cousin-sister",
            FatherInLaw => "father-in-law",
            MotherInLaw => "mother-in-law",
            BrotherInLaw => "brother-in-law",
            SisterInLaw => "sister-in-law",
            SonInLaw => "son-in-law",
            DaughterInLaw => "daughter-in-law",
            GranddaughterInLaw => "granddaughter-in-law",
        }
    }

    /// Gender the relation implies for its subject.
    pub fn gender(self) -> Gender {
        match self {
            Husband | Father | Son | Brother | Grandfather | MaternalGrandfather | Grandson
            | GreatGrandfather | GreatGrandson | Uncle | MaternalUncle | PaternalUncle | Nephew
            | CousinBrother | FatherInLaw | BrotherInLaw | SonInLaw => M,
            Wife | Mother | Daughter | Sister | Grandmother | MaternalGrandmother
            | Granddaughter | GreatGrandmother | GreatGranddaughter | Aunt | MaternalAunt
            | PaternalAunt | Niece | CousinSister | MotherInLaw | SisterInLaw | DaughterInLaw
            | GranddaughterInLaw => F,
            Selfsame | Cousin => U,
        }
    }

    /// The more general relation this one specializes, if any.
    pub fn supertype(self) -> Option<CanonicalRelation> {
        match self {
            MaternalUncle | PaternalUncle => Some(Uncle),
            MaternalAunt | PaternalAunt => Some(Aunt),
            MaternalGrandfather => Some(Grandfather),
            MaternalGrandmother => Some(Grandmother),
            CousinBrother | CousinSister => Some(Cousin),
            _ => None,
        }
    }

    /// Whether a resolved `name` satisfies a claimed relation `self` (equal,
    /// or a more specific subtype of it).
    pub fn admits(self, name: CanonicalRelation) -> bool {
        name == self || name.supertype() == Some(self)
    }

    /// All readings of the word; the first is the default. `matches` are
    /// inclusive patterns for recognizing existing referents; `builds` pick
    /// one concrete lineage for fresh ones (paternal where the word leaves
    /// the lineage open, matching the convention of the worked puzzles).
    pub fn readings(self) -> &'static [Reading] {
        match self {
            Selfsame => &[],
            Husband => &[reading!("spouse", &[Spouse(M)])],
            Wife => &[reading!("spouse", &[Spouse(F)])],
            Father => &[reading!("parent", &[Parent(M)])],
            Mother => &[reading!("parent", &[Parent(F)])],
            Son => &[reading!("child", &[Child(M)])],
            Daughter => &[reading!("child", &[Child(F)])],
            Brother => &[reading!("sibling", &[Sibling(M)])],
            Sister => &[reading!("sibling", &[Sibling(F)])],
            Grandfather => &[reading!(
                "fathers-father",
                &[Parent(U), Parent(M)],
                &[Parent(M), Parent(M)]
            )],
            Grandmother => &[reading!(
                "fathers-mother",
                &[Parent(U), Parent(F)],
                &[Parent(M), Parent(F)]
            )],
            MaternalGrandfather => &[reading!("mothers-father", &[Parent(F), Parent(M)])],
            MaternalGrandmother => &[reading!("mothers-mother", &[Parent(F), Parent(F)])],
            Grandson => &[reading!(
                "sons-son",
                &[Child(U), Child(M)],
                &[Child(M), Child(M)]
            )],
            Granddaughter => &[reading!(
                "sons-daughter",
                &[Child(U), Child(F)],
                &[Child(M), Child(F)]
            )],
            GreatGrandfather => &[reading!(
                "paternal-line",
                &[Parent(U), Parent(U), Parent(M)],
                &[Parent(M), Parent(M), Parent(M)]
            )],
            GreatGrandmother => &[reading!(
                "paternal-line",
                &[Parent(U), Parent(U), Parent(F)],
                &[Parent(M), Parent(M), Parent(F)]
            )],
            GreatGrandson => &[reading!(
                "sons-line",
                &[Child(U), Child(U), Child(M)],
                &[Child(M), Child(M), Child(M)]
            )],
            GreatGranddaughter => &[reading!(
                "sons-line",
                &[Child(U), Child(U), Child(F)],
                &[Child(M), Child(M), Child(F)]
            )],
            Uncle => &[
                reading!(
                    "parents-brother",
                    &[Parent(U), Sibling(M)],
                    &[Parent(M), Sibling(M)]
                ),
                reading!("fathers-brother", &[Parent(M), Sibling(M)]),
            ],
            Aunt => &[
                reading!(
                    "parents-sister",
                    &[Parent(U), Sibling(F)],
                    &[Parent(M), Sibling(F)]
                ),
                reading!("fathers-sister", &[Parent(M), Sibling(F)]),
            ],
            MaternalUncle => &[reading!("mothers-brother", &[Parent(F), Sibling(M)])],
            MaternalAunt => &[reading!("mothers-sister", &[Parent(F), Sibling(F)])],
            PaternalUncle => &[reading!("fathers-brother", &[Parent(M), Sibling(M)])],
            PaternalAunt => &[reading!("fathers-sister", &[Parent(M), Sibling(F)])],
            Nephew => &[reading!(
                "siblings-son",
                &[Sibling(U), Child(M)],
                &[Sibling(M), Child(M)]
            )],
            Niece => &[
                reading!(
                    "brothers-daughter",
                    &[Sibling(M), Child(F)],
                    &[Sibling(M), Child(F)]
                ),
                reading!("siblings-daughter", &[Sibling(U), Child(F)]),
            ],
            Cousin => &[reading!(
                "fathers-brothers-child",
                &[Parent(U), Sibling(U), Child(U)],
                &[Parent(M), Sibling(M), Child(U)]
            )],
            CousinBrother => &[reading!(
                "parents-siblings-son",
                &[Parent(U), Sibling(U), Child(M)],
                &[Parent(M), Sibling(M), Child(M)]
            )],
            CousinSister => &[reading!(
                "parents-siblings-daughter",
                &[Parent(U), Sibling(U), Child(F)],
                &[Parent(M), Sibling(M), Child(F)]
            )],
            FatherInLaw => &[reading!("spouses-father", &[Spouse(U), Parent(M)])],
            MotherInLaw => &[reading!("spouses-mother", &[Spouse(U), Parent(F)])],
            BrotherInLaw => &[
                reading!(
                    "sisters-husband",
                    &[Sibling(F), Spouse(M)],
                    &[Sibling(F), Spouse(M)]
                ),
                reading!("spouses-brother", &[Spouse(U), Sibling(M)]),
            ],
            SisterInLaw => &[
                reading!(
                    "brothers-wife",
                    &[Sibling(M), Spouse(F)],
                    &[Sibling(M), Spouse(F)]
                ),
                reading!("husbands-sister", &[Spouse(M), Sibling(F)]),
            ],
            SonInLaw => &[reading!("daughters-husband", &[Child(F), Spouse(M)])],
            DaughterInLaw => &[reading!("sons-wife", &[Child(M), Spouse(F)])],
            GranddaughterInLaw => &[reading!(
                "grandsons-wife",
                &[Child(U), Child(M), Spouse(F)],
                &[Child(M), Child(M), Spouse(F)]
            )],
        }
    }

    /// Picks a reading by label; the default when `label` is `None`.
    pub fn reading(self, label: Option<&str>) -> Option<&'static Reading> {
        let all = self.readings();
        match label {
            None => all.first(),
            Some(l) => all.iter().find(|r| r.label == l),
        }
    }

    /// Every relation word usable in chains or substitutions.
    pub fn all() -> &'static [CanonicalRelation] {
        &[
            Husband,
            Wife,
            Father,
            Mother,
            Son,
            Daughter,
            Brother,
            Sister,
            Grandfather,
            Grandmother,
            MaternalGrandfather,
            MaternalGrandmother,
            Grandson,
            Granddaughter,
            GreatGrandfather,
            GreatGrandmother,
            GreatGrandson,
            GreatGranddaughter,
            Uncle,
            Aunt,
            MaternalUncle,
            MaternalAunt,
            PaternalUncle,
            PaternalAunt,
            Nephew,
            Niece,
            Cousin,
            CousinBrother,
            CousinSister,
            FatherInLaw,
            MotherInLaw,
            BrotherInLaw,
            SisterInLaw,
            SonInLaw,
            DaughterInLaw,
            GranddaughterInLaw,
        ]
    }

    /// Lowercased spellings this word may appear under in puzzle text,
    /// including the hyphen-free and spaced variants the tables print.
    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            Selfsame => &[],
            Husband => &["husband"],
            Wife => &["wife"],
            Father => &["father"],
            Mother => &["mother"],
            Son => &["son"],
            Daughter => &["daughter"],
            Brother => &["brother"],
            Sister => &["sister"],
            Grandfather => &["grandfather", "grand father"],
            Grandmother => &["grandmother", "grand mother"],
            MaternalGrandfather => &["maternal grandfather", "maternal grand father"],
            MaternalGrandmother => &["maternal grandmother", "maternal grand mother"],
            Grandson => &["grandson", "grand son"],
            Granddaughter => &["granddaughter", "grand daughter"],
            GreatGrandfather => &["great-grandfather", "greatgrandfather", "great grandfather"],
            GreatGrandmother => &["great-grandmother", "greatgrandmother", "great grandmother"],
            GreatGrandson => &["great-grandson", "greatgrandson", "great grandson"],
            GreatGranddaughter => &[
                "great-granddaughter",
                "greatgranddaughter",
                "great granddaughter",
            ],
            Uncle => &["uncle"],
            Aunt => &["aunt"],
            MaternalUncle => &["maternal uncle", "maternal-uncle"],
            MaternalAunt => &["maternal aunt", "maternal-aunt"],
            PaternalUncle => &["paternal uncle", "paternal-uncle"],
            PaternalAunt => &["paternal aunt", "paternal-aunt"],
            Nephew => &["nephew"],
            Niece => &["niece"],
            Cousin => &["cousin"],
            CousinBrother => &["cousin brother", "cousin-brother"],
            CousinSister => &["cousin sister", "cousin-sister"],
            FatherInLaw => &[
                "father-in-law",
                "father in law",
                "father inlaw",
                "fatherinlaw",
            ],
            MotherInLaw => &[
                "mother-in-law",
                "mother in law",
                "mother inlaw",
                "motherinlaw",
            ],
            BrotherInLaw => &[
                "brother-in-law",
                "brother in law",
                "brother inlaw",
                "brotherinlaw",
            ],
            SisterInLaw => &[
                "sister-in-law",
                "sister in law",
                "sister inlaw",
                "sisterinlaw",
            ],
            SonInLaw => &["son-in-law", "son in law", "son inlaw", "soninlaw"],
            DaughterInLaw => &[
                "daughter-in-law",
                "daughter in law",
                "daughter inlaw",
                "daughterinlaw",
            ],
            GranddaughterInLaw => &[
                "granddaughter-in-law",
                "grand daughter inlaw",
                "granddaughter inlaw",
                "grand daughter in law",
                "granddaughterinlaw",
            ],
        }
    }

    /// Looks a word up by any alias (input already lowercased).
    pub fn from_alias(text: &str) -> Option<CanonicalRelation> {
        CanonicalRelation::all()
            .iter()
            .copied()
            .find(|w| w.aliases().contains(&text))
    }
}

/// Names `subject`'s relation to `anchor` by structural pattern matching,
/// most specific first. Only definite matches count: an unknown gender never
/// satisfies a gendered pattern here.
pub fn name_relation(
    g: &FamilyGraph,
    subject: PersonId,
    anchor: PersonId,
) -> Option<CanonicalRelation> {
    let t = g.find(subject);
    let a = g.find(anchor);
    let tg = g.gender(t);
    if t == a {
        return Some(Selfsame);
    }
    let by_gender = |m: CanonicalRelation, f: CanonicalRelation| match tg {
        Gender::Male => Some(m),
        Gender::Female => Some(f),
        Gender::Unknown => None,
    };
    if g.spouses(a).contains(&t) {
        return by_gender(Husband, Wife);
    }
    if g.parents(a).contains(&t) {
        return by_gender(Father, Mother);
    }
    if g.children(a).contains(&t) {
        return by_gender(Son, Daughter);
    }
    if g.siblings(a).contains(&t) {
        return by_gender(Brother, Sister);
    }
    // Grandparents / grandchildren, with maternal subtypes where determined.
    for p in g.parents(a) {
        if g.parents(p).contains(&t) {
            return match (g.gender(p), tg) {
                (Gender::Female, Gender::Male) => Some(MaternalGrandfather),
                (Gender::Female, Gender::Female) => Some(MaternalGrandmother),
                _ => by_gender(Grandfather, Grandmother),
            };
        }
    }
    for c in g.children(a) {
        if g.children(c).contains(&t) {
            return by_gender(Grandson, Granddaughter);
        }
    }
    for p in g.parents(a) {
        for pp in g.parents(p) {
            if g.parents(pp).contains(&t) {
                return by_gender(GreatGrandfather, GreatGrandmother);
            }
        }
    }
    for c in g.children(a) {
        for cc in g.children(c) {
            if g.children(cc).contains(&t) {
                return by_gender(GreatGrandson, GreatGranddaughter);
            }
        }
    }
    // Uncles and aunts: a parent's sibling, specialized by the parent.
    for p in g.parents(a) {
        if g.siblings(p).contains(&t) {
            return match (g.gender(p), tg) {
                (Gender::Male, Gender::Male) => Some(PaternalUncle),
                (Gender::Male, Gender::Female) => Some(PaternalAunt),
                (Gender::Female, Gender::Male) => Some(MaternalUncle),
                (Gender::Female, Gender::Female) => Some(MaternalAunt),
                _ => by_gender(Uncle, Aunt),
            };
        }
    }
    // Nephews and nieces: a sibling's child.
    for s in g.siblings(a) {
        if g.children(s).contains(&t) {
            return by_gender(Nephew, Niece);
        }
    }
    // Cousins: a parent's sibling's child.
    for p in g.parents(a) {
        for ps in g.siblings(p) {
            if g.children(ps).contains(&t) {
                return match tg {
                    Gender::Male => Some(CousinBrother),
                    Gender::Female => Some(CousinSister),
                    Gender::Unknown => Some(Cousin),
                };
            }
        }
    }
    // In-laws.
    for s in g.spouses(a) {
        if g.parents(s).contains(&t) {
            return by_gender(FatherInLaw, MotherInLaw);
        }
    }
    for c in g.children(a) {
        if g.spouses(c).contains(&t) {
            return by_gender(SonInLaw, DaughterInLaw);
        }
    }
    for s in g.siblings(a) {
        if g.spouses(s).contains(&t) {
            return by_gender(BrotherInLaw, SisterInLaw);
        }
    }
    for s in g.spouses(a) {
        if g.siblings(s).contains(&t) {
            return by_gender(BrotherInLaw, SisterInLaw);
        }
    }
    for c in g.children(a) {
        for cc in g.children(c) {
            if g.spouses(cc).contains(&t) && tg == Gender::Female {
                return Some(GranddaughterInLaw);
            }
        }
    }
    None
}

/// Whether a person of `gender` could fill a slot requiring `want` (an
/// unknown gender can, committing to `want` if the reading is selected).
pub fn could_match(gender: Gender, want: Gender) -> bool {
    want == U || gender == U || gender == want
}
