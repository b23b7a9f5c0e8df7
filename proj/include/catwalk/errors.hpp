#pragma once

#include <stdexcept>
#include <string>

namespace catwalk
{
// Invalid probability, rate, size or missing experiment parameter.
class ParameterError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// State or argument outside the domain where an operation is defined.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

// Non-finite intermediate values.
class NumericError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, std::string const& message)
{
    if (!condition)
    {
        throw ParameterError(message);
    }
}
}  // namespace catwalk
