"""Instance generators, closure-property suites and the inserter counterexample search."""
