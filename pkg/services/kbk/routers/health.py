from fastapi import APIRouter

from services.kbk.core.config import settings

router = APIRouter()

@router.get("")
def ok():
    return {"status": "ok", "env": settings.env}
