#include "rm/error.hpp"

namespace rm {

const char* status_name(rm_status code) noexcept {
    switch (code) {
        case RM_OK: return "Ok";
        case RM_NO_RESULT: return "NoResult";
        case RM_ERR_INVALID_ARGUMENT: return "InvalidArgument";
        case RM_ERR_SYNTAX: return "SyntaxError";
        case RM_ERR_UNKNOWN_VARIABLE: return "UnknownVariable";
        case RM_ERR_ARITY: return "ArityMismatch";
        case RM_ERR_RING_MISMATCH: return "RingMismatch";
        case RM_ERR_DIVERGENCE: return "DivergenceSuspected";
        case RM_ERR_ZERO_DENOMINATOR: return "ZeroDenominatorAtDepth";
        case RM_ERR_TERMINATED: return "TerminatedFraction";
        case RM_ERR_ALL_ZERO: return "AllZeroConvergents";
        case RM_ERR_UNKNOWN_CONSTANT: return "UnknownConstant";
        case RM_ERR_PRECISION_UNACHIEVABLE: return "PrecisionUnachievable";
        case RM_ERR_PRECISION_TOO_LOW: return "PrecisionTooLow";
        case RM_ERR_NO_MATCH: return "NoMatch";
        case RM_ERR_LOW_CONFIDENCE: return "LowConfidence";
        case RM_ERR_SINGULAR_STEP: return "SingularStep";
        case RM_ERR_NON_POSITIVE: return "NonPositiveCoordinate";
        case RM_ERR_SINGULAR_U: return "SingularU";
        case RM_ERR_NOT_POLYNOMIAL: return "CoboundaryNotPolynomial";
        case RM_ERR_ELIMINATION_DEGENERATE: return "EliminationDegenerate";
        case RM_ERR_DEGENERATE_PARAMS: return "DegenerateParams";
        case RM_ERR_CONDITION_VIOLATED: return "ConditionViolated";
        case RM_ERR_UNKNOWN_FIELD: return "UnknownField";
        case RM_ERR_DEFECTIVE_LIMIT: return "DefectiveLimitMatrix";
        case RM_ERR_INSUFFICIENT_PRECISION: return "InsufficientPrecision";
        case RM_ERR_SINGULAR_SYSTEM: return "SingularSystem";
        case RM_ERR_STUCK: return "StuckAtSingular";
        case RM_ERR_INDEX_RANGE: return "IndexOutOfRange";
        case RM_ERR_UNKNOWN_CHUNK: return "UnknownChunk";
        case RM_ERR_LEASE_EXPIRED: return "LeaseExpired";
        case RM_ERR_MALFORMED_RESULT: return "MalformedResult";
        case RM_ERR_IO: return "IoError";
        case RM_ERR_NETWORK: return "NetworkError";
        case RM_ERR_INTERNAL: return "InternalError";
    }
    return "Unknown";
}

}  // namespace rm
