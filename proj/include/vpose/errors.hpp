#pragma once

#include <stdexcept>
#include <string>

namespace vpose
{

/// Parameter outside its admissible range (e.g. a patch coordinate outside [0,1]).
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// Query point outside the evaluable footprint of a terrain surface.
class OutOfBoundsError : public std::out_of_range
{
public:
    using std::out_of_range::out_of_range;
};

/// A contact-force solve that did not produce an admissible answer.
class SolverError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input files (JSON schema violations, inconsistent sizes).
class SchemaError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace vpose
