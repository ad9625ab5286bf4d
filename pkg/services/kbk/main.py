from fastapi import FastAPI
from services.kbk.routers import health, scenarios

app = FastAPI(title="KBK Simulation API", version="0.1.0")

app.include_router(health.router, prefix="/health", tags=["health"])
app.include_router(scenarios.router, prefix="/scenarios", tags=["scenarios"])
