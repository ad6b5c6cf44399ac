#include "gaussbp/error.hpp"

namespace gaussbp {

ZeroMass::ZeroMass(const std::string& what, Edge edge)
    : Error(what + " (factor " + std::to_string(edge.factor) +
            (edge.to_variable ? " -> variable " : " <- variable ") +
            std::to_string(edge.variable) + ")"),
      edge_(edge) {}

ConfigError::ConfigError(const std::string& what, std::size_t line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

}  // namespace gaussbp
