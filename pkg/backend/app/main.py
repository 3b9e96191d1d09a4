from fastapi import FastAPI

from app.api.v1.network import router as network_router
from app.api.v1.plan import router as plan_router
from app.core.config import get_settings

app = FastAPI(title="FOON Collaborative Planner API", version="0.1.0")

app.include_router(network_router, prefix="/api/v1")
app.include_router(plan_router, prefix="/api/v1")


@app.get("/health")
def health_check() -> dict:
    return {"status": "ok"}


@app.get("/health/config")
def config_check() -> dict:
    """Effective planner defaults (no secrets; the Redis URL is reduced to on/off)."""
    settings = get_settings()
    data = settings.model_dump(exclude={"redis_url"})
    data["cache_enabled"] = bool(settings.redis_url)
    return data
