#pragma once

#include <stdexcept>
#include <string>

namespace privml {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ingest
struct MalformedDocument : Error { using Error::Error; };
struct MissingProcmemory : Error { using Error::Error; };
struct RegionFieldError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct ValueError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// features
struct UnknownPrivilege : Error { using Error::Error; };
struct DegenerateSplit : Error { using Error::Error; };

// models
struct EmptyDataset : Error { using Error::Error; };
struct EmptyNode : Error { using Error::Error; };
struct PartitionMismatch : Error { using Error::Error; };
struct SingleClass : Error { using Error::Error; };
struct InsufficientClassData : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct UntrainedModel : Error { using Error::Error; };

// evaluation
struct LengthMismatch : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };

// persistence
struct VersionMismatch : Error { using Error::Error; };
struct CorruptArtifact : Error { using Error::Error; };

}  // namespace privml
