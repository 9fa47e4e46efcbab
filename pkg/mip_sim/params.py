"""
Mobile-agent and radio parameters, plus the payload model shared by the
planners (free-payload segmentation) and the simulator.
"""

from pydantic import BaseModel, ConfigDict, Field


class AgentParams(BaseModel):
    """Agent sizes, rates and delays.

    Radio data rate and per-hop control delay default to 250 kbps and 2 ms.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    processing_code_bits: float = Field(1024.0, gt=0)
    # pc already includes the MA packet header
    header_included: bool = True
    data_rate_bps: float = Field(250_000.0, gt=0)
    processing_rate_bps: float = Field(50e6, gt=0)
    access_delay_s: float = Field(0.010, gt=0)
    control_delay_s: float = Field(0.002, gt=0)
    raw_data_bits: float = Field(2048.0, gt=0)
    reduction_ratio: float = Field(0.8, ge=0, lt=1)
    aggregation_ratio: float = Field(0.9, gt=0, le=1)
    # read reduction_ratio as the kept fraction instead of the removed one
    reduction_means_kept: bool = False
    # one access delay at the clone point before the CMA departs
    charge_cloning_delay: bool = True

    @property
    def reduced_data_bits(self) -> float:
        """d: one source's sensed data after raw-data reduction"""
        if self.reduction_means_kept:
            return self.raw_data_bits * self.reduction_ratio
        return self.raw_data_bits * (1.0 - self.reduction_ratio)

    @property
    def cloning_delay_s(self) -> float:
        return self.access_delay_s if self.charge_cloning_delay else 0.0


class EnergyParams(BaseModel):
    """First-order radio model constants"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    elec_j_per_bit: float = Field(50e-9, gt=0)
    amp_j_per_bit_m2: float = Field(100e-12, gt=0)


def per_source_payload(params: AgentParams) -> float:
    """d x f, the payload one visited source adds to the agent"""
    return params.reduced_data_bits * params.aggregation_ratio


def payload_after(j: int, params: AgentParams) -> float:
    """Aggregated payload carried after visiting j sources (j x d x f)"""
    if j < 0:
        raise ValueError("visited source count cannot be negative")
    return j * per_source_payload(params)
