#pragma once

#include <stdexcept>
#include <string>

namespace gnls {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoConvergence : public Error {
public:
    NoConvergence(int iterations, double final_norm)
        : Error("Newton did not converge after " + std::to_string(iterations) +
                " iterations (residual " + std::to_string(final_norm) + ")"),
          iterations(iterations), final_norm(final_norm) {}
    int iterations;
    double final_norm;
};

class SingularJacobian : public Error {
public:
    SingularJacobian() : Error("singular Jacobian") {}
};

class InconsistentConstraint : public Error {
public:
    using Error::Error;
};

class NoImaginaryPair : public Error {
public:
    NoImaginaryPair() : Error("linearization has no simple imaginary pair") {}
};

class SegmentLeavesBox : public Error {
public:
    SegmentLeavesBox() : Error("trajectory left the phase-space box") {}
};

class LostBracket : public Error {
public:
    LostBracket() : Error("event refinement lost its bracket") {}
};

class ImmediateFailure : public Error {
public:
    ImmediateFailure() : Error("continuation could not take a first step") {}
};

class DegenerateProjection : public Error {
public:
    DegenerateProjection() : Error("projected orbit passes through the origin") {}
};

class NoBifurcatingSolution : public Error {
public:
    NoBifurcatingSolution() : Error("no bifurcating solution found") {}
};

class SeedNotOnCurve : public Error {
public:
    SeedNotOnCurve() : Error("seed does not satisfy the defining system") {}
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

class UnknownKey : public ParseError {
public:
    UnknownKey(int line, const std::string& key) : ParseError(line, "unknown key '" + key + "'") {}
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gnls
