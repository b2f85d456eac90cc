"""Command lines shared by the CLI and determinism tests (threads are appended per run)."""

CASES = [
    ["intersective", "check", "--poly", "(x^2-13)(x^2-17)(x^2-221)", "--bound", "2000"],
    ["intersective", "check", "--poly", "x^2-13", "--bound", "200"],
    ["auxpoly", "--poly", "x^3-19", "--Dmax", "60"],
    ["expsum", "complete", "--poly", "0,0,1", "--q", "15", "--a", "2"],
    ["expsum", "weyl", "--poly", "0,0,1", "--P", "20000", "--theta", "1/3"],
    ["expsum", "predict", "--poly", "0,0,1", "--P", "20000", "--q", "5", "--a", "2"],
    ["arc", "classify", "--alpha", "1/2", "--X", "1e6", "--d", "2", "--exponent", "2"],
    ["weights", "--poly", "x^3-19", "--w", "2", "--gamma", "2", "--X", "5000", "--align", "--table", "nu", "--decay",
     "--samples", "32", "--vanishing", "20"],
    ["bohr", "census", "--rho", "1/5", "--P", "30000", "--K", "2", "--seed", "5"],
    ["bohr", "certify", "--rho", "1/10", "--P", "30000", "--seed", "9"],
    ["bohr", "harman", "--rho", "1/3", "--P", "5000", "--K", "2", "--seed", "1"],
    ["bohr", "exponent", "--K", "3", "--d", "2"],
    ["regular", "verdict", "--a", "1,1,1,-1,-1", "--poly", "0,0,1", "--bound", "500"],
    ["count", "mono", "--poly", "x^2", "--a", "1,1,-1,-1", "--N", "400", "--r", "3", "--seed", "4"],
    ["count", "dense", "--poly", "x^2", "--a", "1,1,-1,-1", "--N", "400", "--delta", "0.5", "--seed", "2"],
    ["count", "exact", "--poly", "x^2", "--a", "1,1,1,-1,-1,-1", "--ladder", "100,200"],
]
