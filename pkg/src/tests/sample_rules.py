"""
Rule files shared by the pySqlEquiv test suites

Tables have concrete schemas so that the oracle's instance space stays small.
"""

from pysqlequiv.parser import parse_rule_file

# ===================================
# Small equivalent rules
# ===================================

UNION_SELECTION = """
TYPE a
TABLE R : node(leaf a, leaf int)
TABLE S : node(leaf a, leaf int)
PRED b : node(empty, node(leaf a, leaf int))

RULE union_selection
  SELECT * FROM (R UNION ALL S) WHERE b
  EQUIV
  (SELECT * FROM R WHERE b) UNION ALL (SELECT * FROM S WHERE b)
END
"""

DISTINCT_SELF_JOIN = """
TYPE a
SCHEMA s
TABLE R : s
PROJ p : s -> leaf a

RULE distinct_self_join
  SELECT DISTINCT p FROM R
  EQUIV
  SELECT DISTINCT Left.p FROM R, R WHERE VAR(Right.Left.p) = VAR(Right.Right.p)
END
"""

JOIN_COMMUTE = """
TABLE R : leaf int
TABLE S : leaf bool

RULE join_commute
  SELECT * FROM R, S
  EQUIV
  SELECT Right, Left FROM S, R
END
"""

# ===================================
# Invalid rules (mutants)
# ===================================

MUTANTS = """
TYPE a
TYPE k
TABLE R : node(leaf k, leaf a)
TABLE S : node(leaf k, leaf a)
TABLE A : leaf a
TABLE B : leaf a
TABLE T : node(leaf a, leaf k)
PRED b : node(empty, node(leaf k, leaf a))
FUNCTION l : () -> a

-- @expect refuted
RULE self_join_without_distinct
  SELECT Right FROM R
  EQUIV
  SELECT Left.Right FROM R, R WHERE VAR(Right.Left.Right) = VAR(Right.Right.Right)
END

-- @expect refuted
RULE except_commute
  A EXCEPT B
  EQUIV
  B EXCEPT A
END

-- @expect refuted
RULE index_lookup_without_key
  SELECT * FROM R WHERE VAR(Right.Right) = l()
  EQUIV
  SELECT Right FROM (SELECT Left, Right FROM R), R
    WHERE VAR(Right.Left.Left) = VAR(Right.Right.Left) AND VAR(Right.Left.Right) = l()
END

-- @expect refuted
RULE selection_on_wrong_side
  SELECT * FROM R, S WHERE CASTPRED((Left, Right.Left), b)
  EQUIV
  SELECT * FROM R, (SELECT * FROM S WHERE b)
END

-- @expect refuted
RULE cq_missing_join_equality
  SELECT DISTINCT Left.Right FROM R, T WHERE VAR(Right.Left.Left) = VAR(Right.Right.Right)
  EQUIV
  SELECT DISTINCT Left.Left.Right FROM (FROM R, R), T
    WHERE VAR(Right.Left.Left.Right) = VAR(Right.Left.Right.Right)
END

-- @expect refuted
RULE cq_dropped_join
  SELECT DISTINCT Left.Right FROM R, T WHERE VAR(Right.Left.Left) = VAR(Right.Right.Right)
  EQUIV
  SELECT DISTINCT Right FROM R
END
"""

# ===================================
# Premises
# ===================================

KEYED = """
TYPE k
TYPE a
TABLE R : node(leaf k, leaf a)
FUNCTION l : () -> a

RULE index_lookup
  ASSUME KEY(Left, R)
  SELECT * FROM R WHERE VAR(Right.Right) = l()
  EQUIV
  SELECT Right FROM (SELECT Left, Right FROM R), R
    WHERE VAR(Right.Left.Left) = VAR(Right.Right.Left) AND VAR(Right.Left.Right) = l()
END

RULE key_self_join
  ASSUME KEY(Left, R)
  SELECT Left FROM R, R WHERE VAR(Right.Left.Left) = VAR(Right.Right.Left)
  EQUIV
  SELECT * FROM R
END
"""

# ===================================
# Magic sets
# ===================================

# Employees younger than some age working in a department with a large
# budget, joined with the average salary of their department. The magic
# version only averages over departments that can contribute to the result.
MAGIC_SET = """
TYPE did
TABLE Emp : node(leaf did, leaf int)
TABLE Dept : node(leaf did, leaf int)
PRED young : node(leaf did, leaf int)
PRED rich : node(leaf did, leaf int)

RULE magic_dep_avg_sal
  SELECT Left.Left FROM (SELECT * FROM Emp WHERE CASTPRED(Right, young)),
                        (SELECT * FROM Dept WHERE CASTPRED(Right, rich)),
                        (SELECT Left, AVG(Right) FROM Emp GROUP BY Left)
    WHERE VAR(Right.Left.Left.Left) = VAR(Right.Left.Right.Left)
      AND VAR(Right.Left.Left.Left) = VAR(Right.Right.Left)
  EQUIV
  SELECT Left.Left FROM (SELECT * FROM Emp WHERE CASTPRED(Right, young)),
                        (SELECT * FROM Dept WHERE CASTPRED(Right, rich)),
                        (SELECT Left, AVG(Right) FROM
                           (Emp SEMIJOIN
                              (SELECT Left.Left FROM (SELECT * FROM Emp WHERE CASTPRED(Right, young)),
                                                     (SELECT * FROM Dept WHERE CASTPRED(Right, rich))
                                 WHERE VAR(Right.Left.Left) = VAR(Right.Right.Left))
                            ON VAR(Left.Left) = VAR(Right))
                         GROUP BY Left)
    WHERE VAR(Right.Left.Left.Left) = VAR(Right.Left.Right.Left)
      AND VAR(Right.Left.Left.Left) = VAR(Right.Right.Left)
END

-- @expect refuted
RULE magic_wrong_filter
  SELECT Left.Left FROM (SELECT * FROM Emp WHERE CASTPRED(Right, young)),
                        (SELECT * FROM Dept WHERE CASTPRED(Right, rich)),
                        (SELECT Left, AVG(Right) FROM Emp GROUP BY Left)
    WHERE VAR(Right.Left.Left.Left) = VAR(Right.Left.Right.Left)
      AND VAR(Right.Left.Left.Left) = VAR(Right.Right.Left)
  EQUIV
  SELECT Left.Left FROM (SELECT * FROM Emp WHERE CASTPRED(Right, young)),
                        (SELECT * FROM Dept WHERE CASTPRED(Right, rich)),
                        (SELECT Left, AVG(Right) FROM
                           (Emp SEMIJOIN
                              (SELECT Left FROM Dept WHERE NOT CASTPRED(Right, rich))
                            ON VAR(Left.Left) = VAR(Right))
                         GROUP BY Left)
    WHERE VAR(Right.Left.Left.Left) = VAR(Right.Left.Right.Left)
      AND VAR(Right.Left.Left.Left) = VAR(Right.Right.Left)
END
"""


def load(text: str, name: str | None = None):
    """
    Checked rules of a rule file, or the one named `name`.
    """
    checked = parse_rule_file(text).checked
    if name is None:
        return list(checked)
    for rule in checked:
        if rule.name == name:
            return rule
    raise KeyError(name)
