#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scud {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed call-syntax program text. `offset` is the byte position in the input.
struct ParseError : Error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t offset_)
        : Error("offset " + std::to_string(offset_) + ": " + msg), offset(offset_) {}
};

struct IoError : Error {
    using Error::Error;
};

// Structurally invalid JSON/JSONL payloads (vocabulary files, pool files, LLM replies).
struct DataError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct UnknownMap : ConfigError {
    using ConfigError::ConfigError;
};

// An internal (non-leaf) node label is missing from the vocabulary.
struct UnknownInternalOperator : ConfigError {
    using ConfigError::ConfigError;
};

// Prompt template missing (or repeating) one of its required placeholders.
struct MissingSlot : ConfigError {
    using ConfigError::ConfigError;
};

struct EmptyFewShots : ConfigError {
    using ConfigError::ConfigError;
};

struct MalformedJson : DataError {
    using DataError::DataError;
};

struct MissingCodeField : DataError {
    using DataError::DataError;
};

struct MultipleRoots : DataError {
    using DataError::DataError;
};

struct UnparseableCode : DataError {
    using DataError::DataError;
};

struct PoolError : Error {
    using Error::Error;
};

// Pool JSONL line with missing/ill-typed fields; message carries the line number.
struct SchemaError : PoolError {
    using PoolError::PoolError;
};

struct EmptyPool : PoolError {
    using PoolError::PoolError;
};

struct EmptyCorpus : Error {
    using Error::Error;
};

struct UnknownDoc : Error {
    using Error::Error;
};

// Selection file references an entry id the pool does not contain.
struct MissingEntry : DataError {
    using DataError::DataError;
};

struct LengthMismatch : DataError {
    using DataError::DataError;
};

// A gold program that fails to parse; message carries the pair index.
struct GoldParseError : DataError {
    using DataError::DataError;
};

// Fragment whose origin_id names no whole in the pool.
struct DanglingOrigin : PoolError {
    using PoolError::PoolError;
};

struct DuplicateId : PoolError {
    using PoolError::PoolError;
};

// Stored anon_template/depth disagrees with the value recomputed from the entry's program.
struct CacheMismatch : PoolError {
    using PoolError::PoolError;
};

// LLM endpoint failure after retries are exhausted, or an unmatchable mock request.
struct ProviderError : Error {
    using Error::Error;
};

}  // namespace scud
