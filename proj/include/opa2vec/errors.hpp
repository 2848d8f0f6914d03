#pragma once

#include <stdexcept>
#include <string>

namespace opa2vec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Referenced ontology class is not declared in the knowledge base.
struct UnknownClass : Error {
    explicit UnknownClass(const std::string& iri) : Error("unknown class: " + iri) {}
};

// Token has no vector in the embedding model.
struct UnknownToken : Error {
    explicit UnknownToken(const std::string& token) : Error("unknown token: " + token) {}
};

struct EmptyVocabulary : Error {
    EmptyVocabulary() : Error("vocabulary is empty after min_count filtering") {}
};

struct ConfigMismatch : Error {
    using Error::Error;
};

struct NotImplemented : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

struct ZeroVector : Error {
    ZeroVector() : Error("cosine of a zero vector is undefined") {}
};

struct DimMismatch : Error {
    using Error::Error;
};

struct EmptyAnnotations : Error {
    explicit EmptyAnnotations(const std::string& entity)
        : Error("entity has an empty annotation set: " + entity) {}
};

struct DegenerateLabels : Error {
    DegenerateLabels() : Error("ROC needs at least one positive and one negative label") {}
};

struct PairSetMismatch : Error {
    using Error::Error;
};

struct CannotBalance : Error {
    using Error::Error;
};

// Bad configuration or unusable input file; the CLI maps this to exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

// A pipeline stage failed at run time; the CLI maps this to exit code 1.
struct StageError : Error {
    StageError(const std::string& stage, const std::string& what)
        : Error("stage '" + stage + "' failed: " + what), stage(stage) {}
    std::string stage;
};

} // namespace opa2vec
