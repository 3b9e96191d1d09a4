from typing import List, Literal

from fastapi import APIRouter, File, HTTPException, UploadFile
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from ...core.errors import FoonError, ParseError
from ...models.documents import NetworkDocument
from ...services.exporter import foon_from_document, network_document, network_graph, to_dot
from ...services.foon_parser import parse_subgraph
from ...services.network import merge

router = APIRouter(prefix="/network", tags=["network"])


class MergeResponse(BaseModel):
    units_in: int
    units_after: int
    network: NetworkDocument


class ExportBody(BaseModel):
    network: NetworkDocument
    format: Literal["dot", "structured"] = "dot"


@router.post("/merge", response_model=MergeResponse)
async def merge_subgraphs(files: List[UploadFile] = File(...)):
    """Upload subgraph files and get back the deduplicated universal network."""
    subgraphs = []
    for upload in files:
        name = (upload.filename or "").rsplit(".", 1)[0]
        try:
            text = (await upload.read()).decode("utf-8")
            subgraphs.append(parse_subgraph(text, name=name))
        except UnicodeDecodeError:
            raise HTTPException(status_code=400, detail=f"{upload.filename}: not UTF-8 text")
        except ParseError as e:
            raise HTTPException(status_code=e.http_status, detail=str(e.with_source(upload.filename)))

    try:
        foon = merge(subgraphs)
    except FoonError as e:
        raise HTTPException(status_code=e.http_status, detail=str(e))

    return MergeResponse(
        units_in=sum(len(sg.units) for sg in subgraphs),
        units_after=len(foon),
        network=network_document(foon),
    )


@router.post("/export")
def export_network(body: ExportBody):
    try:
        foon = foon_from_document(body.network)
    except FoonError as e:
        raise HTTPException(status_code=e.http_status, detail=str(e))
    if body.format == "dot":
        return PlainTextResponse(to_dot(network_graph(foon), name="universal"))
    return network_document(foon)
