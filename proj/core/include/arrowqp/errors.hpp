#ifndef ARROWQP_ERRORS_HPP
#define ARROWQP_ERRORS_HPP

#include <stdexcept>
#include <string>

#include "arrowqp/typedefs.hpp"

namespace arrowqp
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A Cholesky pivot was non-positive or negligible. `block` is the BTDA block
// index (the arrow corner reports the number of diagonal blocks), `pivot` is
// the row within that block.
class NotPositiveDefinite : public Error
{
public:
    NotPositiveDefinite(isize block, isize pivot)
      : Error("matrix not positive definite at block " + std::to_string(block) +
              ", pivot " + std::to_string(pivot)),
        block(block), pivot(pivot)
    {}

    isize block;
    isize pivot;
};

// A nonzero landed outside the block-tri-diagonal-arrow pattern.
class StructureViolation : public Error
{
public:
    StructureViolation(isize row, isize col)
      : Error("entry (" + std::to_string(row) + ", " + std::to_string(col) +
              ") lies outside the block structure"),
        row(row), col(col)
    {}

    isize row;
    isize col;
};

class SparsityChanged : public Error
{
public:
    using Error::Error;
};

class NoConvergence : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    using Error::Error;
};

class InvalidProblem : public Error
{
public:
    using Error::Error;
};

} // namespace arrowqp

#endif
