"""Minimal model sources, one per diagnostic code.

Each error fixture parses cleanly and trips exactly one error code; warnings
may ride along only where the fixture cannot avoid them.
"""

BASE_DEPLOY = "node A <<EndDevice>> { component a } node B <<EdgeNode>> { component b } path A -- B <<5G>>"


def wrap(deployment: str = BASE_DEPLOY, classes: str = "", extra: str = "") -> str:
    return f'model "fixture" {{ deployment {{ {deployment} }} classes {{ {classes} }} {extra} }}'


ERROR_FIXTURES = {
    "V001": wrap("node A <<5G>> {}"),
    "V002": wrap(BASE_DEPLOY + " dependency a -> b <<EndDevice>>"),
    "V003": wrap("node A <<secrecy>> {}"),
    "V004": wrap("node A <<Actor>> {}"),
    "V005": wrap("node A {} node B {} path A -- B"),
    "V006": wrap("node A <<EndDevice>> <<Cloud>> {}"),
    "V007": wrap(classes="class C { roles = [DataSubject] }"),
    "V008": wrap(classes='actor U {} class C { attr x rights = "(x, U)" }'),
    "V009": wrap(classes='actor U {} class C <<DataTraceability>> { attr x rights = "(Ghost, U)" }'),
    "V010": wrap(classes='class C <<DataTraceability>> { attr x rights = "(x, Nobody)" }'),
    "V011": wrap(classes='actor U { trusts = ["Nobody"] }'),
    "V012": wrap("node A {} path A -- Z <<5G>>"),
    "V013": wrap(BASE_DEPLOY + " dependency a -> zz <<secrecy>>"),
    "V014": wrap("node A { component a } node B { component b } dependency a -> b <<secrecy>>"),
    "V015": wrap(extra="adversary X { <<secrecy>> = {read} }"),
    "V016": wrap(extra="adversary X { <<EdgeNode>> = {read} }"),
    "V017": wrap(classes='actor "Data Owner" {} actor DataOwner {}'),
}

WARNING_FIXTURES = {
    "W101": wrap(classes='actor U { trusts = ["U"] }'),
    "W102": wrap(
        classes='actor U { roles = [DataController] } class C <<DataTraceability>> { attr x rights = "(x, U), (x, U)" }'
    ),
    "W103": wrap(classes='actor U { roles = [DataSubject] } class C <<DataTraceability>> { attr x obligations = "(x, U)" }'),
    "W104": wrap(BASE_DEPLOY + " dependency a -> b"),
    "W105": wrap(classes='actor "Data Owner" {} class C <<DataTraceability>> { attr x rights = "(x, Data-Owner)" }'),
}
