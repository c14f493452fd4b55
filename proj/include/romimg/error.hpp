// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_ERROR_HPP
#define ROMIMG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace romimg
{

// Invalid input or configuration. The CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// A computation that cannot proceed (indefinite pivot, singular block, ...).
// The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string &message)
{
  if (!condition)
    throw ConfigError(message);
}

} // namespace romimg

#endif // ROMIMG_ERROR_HPP
