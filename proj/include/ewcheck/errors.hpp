#pragma once

#include <stdexcept>
#include <string>

namespace ew {

/// Base class for every error the engine raises deliberately.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- symbolic kernel ---
struct DivisionByZeroExpr : Error {
    explicit DivisionByZeroExpr(const std::string& msg = "division by an expression that normalizes to zero")
        : Error(msg) {}
};
struct UnknownSymbol : Error {
    explicit UnknownSymbol(const std::string& msg) : Error(msg) {}
};
struct DuplicateSymbol : Error {
    explicit DuplicateSymbol(const std::string& msg) : Error(msg) {}
};
struct InconsistentJetBinding : Error {
    explicit InconsistentJetBinding(const std::string& msg) : Error(msg) {}
};
struct TableMismatch : Error {
    explicit TableMismatch(const std::string& msg) : Error(msg) {}
};
struct JetDepthExceeded : Error {
    explicit JetDepthExceeded(const std::string& msg) : Error(msg) {}
};

// --- tensor / metric ---
struct SingularMetric : Error {
    explicit SingularMetric(const std::string& msg = "metric determinant normalizes to zero") : Error(msg) {}
};
struct IndefiniteDeterminantSign : Error {
    explicit IndefiniteDeterminantSign(const std::string& msg) : Error(msg) {}
};

// --- weyl pipeline ---
struct ZeroConformalFactor : Error {
    ZeroConformalFactor() : Error("conformal factor normalizes to zero") {}
};
struct NotScalarFlat : Error {
    explicit NotScalarFlat(const std::string& msg = "Weyl scalar curvature is not identically zero") : Error(msg) {}
};
struct NotEW : Error {
    explicit NotEW(const std::string& msg = "Einstein-Weyl residual is not identically zero") : Error(msg) {}
};
struct NotAdapted : Error {
    explicit NotAdapted(const std::string& msg) : Error(msg) {}
};

// --- catalog ---
struct NonInvertibleT : Error {
    explicit NonInvertibleT(const std::string& msg) : Error(msg) {}
};
struct ZeroJacobian : Error {
    ZeroJacobian() : Error("coordinate change has vanishing Jacobian (T_t normalizes to zero)") {}
};
struct NotCase1 : Error {
    explicit NotCase1(const std::string& msg = "structure was not built by the case-1 constructor") : Error(msg) {}
};
struct ZeroKernel : Error {
    ZeroKernel() : Error("Toda kernel normalizes to zero") {}
};

// --- numeric oracle ---
struct PoleAtPoint : Error {
    explicit PoleAtPoint(const std::string& msg) : Error(msg) {}
};
struct UnboundSymbol : Error {
    explicit UnboundSymbol(const std::string& msg) : Error(msg) {}
};

// --- frontend ---
struct SyntaxError : Error {
    int line = 0, column = 0;
    SyntaxError(int line_, int col_, const std::string& msg)
        : Error("line " + std::to_string(line_) + ", column " + std::to_string(col_) + ": " + msg),
          line(line_), column(col_) {}
};
struct DuplicateAssignment : Error {
    explicit DuplicateAssignment(const std::string& msg) : Error(msg) {}
};
struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

}  // namespace ew
