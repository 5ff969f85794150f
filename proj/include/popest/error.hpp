// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace popest {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based; 0 when the format has no line notion.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class GeorefMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Per-building failures carry the building id so batch drivers can keep going.
class BuildingError : public Error {
public:
    BuildingError(std::string id, const std::string& what)
        : Error(id + ": " + what), id_(std::move(id)) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class EmptySelection : public BuildingError {
public:
    explicit EmptySelection(std::string id)
        : BuildingError(std::move(id), "footprint selects no grid cells") {}
};

class InsufficientCoverage : public BuildingError {
public:
    InsufficientCoverage(std::string id, long found, long required)
        : BuildingError(std::move(id), "insufficient coverage: " + std::to_string(found) +
                                           " valid cells, need " + std::to_string(required)),
          found_(found), required_(required) {}
    long found() const noexcept { return found_; }
    long required() const noexcept { return required_; }

private:
    long found_;
    long required_;
};

class LabelMismatch : public Error {
public:
    LabelMismatch(const std::string& what, std::vector<std::string> labels)
        : Error(what), labels_(std::move(labels)) {}
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    std::vector<std::string> labels_;
};

} // namespace popest
